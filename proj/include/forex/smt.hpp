// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// SMT-LIB2 backend. Formulas are discharged by an external solver process
// (anything that accepts `solver -in -smt2` with the script on stdin, e.g.
// z3 or the bundled z3wasm wrapper).
//
// Name mangling: variable x with copy index i prints as x_i; parameter k
// prints as mu_k. A program variable whose printed name matches mu_<digits>,
// starts with v_, or equals an SMT keyword gets a v_ prefix, which keeps the
// mapping injective.
//
// A solver timeout is reported as Unknown. A crashed solver or unparseable
// output raises SolverError; those indicate environment trouble rather than
// a hard query.

#include "formula.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <atomic>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace forex {

enum class SolverResult { Sat, Unsat, Unknown };

inline const char* to_text(SolverResult r) {
    switch (r) {
    case SolverResult::Sat: return "sat";
    case SolverResult::Unsat: return "unsat";
    case SolverResult::Unknown: return "unknown";
    }
    return "?";
}

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverStats {
    long queries = 0;
    long sat = 0;
    long unsat = 0;
    long unknown = 0;
    long timeouts = 0;
    long total_ms = 0;
};

// ---------------------------------------------------------------------------
// Mangling.

namespace detail {

inline bool smt_reserved(const std::string& s) {
    static const std::set<std::string> words = {
        "and",  "or",   "not",   "xor",  "ite",   "let",   "forall", "exists",
        "true", "false", "distinct", "div", "mod", "abs",  "as",     "is",
        "par",  "Int",  "Bool",  "Real", "String", "select", "store", "assert",
        "check", "sat",  "unsat", "unknown", "model", "push", "pop",  "exit"};
    return words.count(s) > 0;
}

inline bool looks_like_param(const std::string& s) {
    if (s.rfind("mu_", 0) != 0 || s.size() <= 3) return false;
    for (size_t i = 3; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

inline std::string mangle(const VarName& v) {
    std::string s = v.str();
    if (looks_like_param(s) || s.rfind("v_", 0) == 0 || smt_reserved(s)) return "v_" + s;
    return s;
}

inline std::string mangle(const Param& p) { return p.str(); }

inline std::string mangle(const Symbol& s) {
    return std::holds_alternative<VarName>(s) ? mangle(std::get<VarName>(s))
                                              : mangle(std::get<Param>(s));
}

// ---------------------------------------------------------------------------
// S-expression emission.

inline void emit_term(const Term& t, std::string& out) {
    switch (t.kind()) {
    case Term::Kind::Literal:
        if (t.value() < 0) {
            out += "(- " + Int(-t.value()).str() + ")";
        } else {
            out += t.value().str();
        }
        return;
    case Term::Kind::Variable: out += mangle(t.var()); return;
    case Term::Kind::Parameter: out += mangle(t.param()); return;
    case Term::Kind::Binary: {
        const char* op = t.op() == ArithOp::Add ? "+" : t.op() == ArithOp::Sub ? "-" : "*";
        out += "(";
        out += op;
        out += " ";
        emit_term(t.lhs(), out);
        out += " ";
        emit_term(t.rhs(), out);
        out += ")";
        return;
    }
    }
}

inline void emit_formula(const Formula& f, std::string& out) {
    switch (f.kind()) {
    case Formula::Kind::True: out += "true"; return;
    case Formula::Kind::False: out += "false"; return;
    case Formula::Kind::Compare: {
        const char* op = nullptr;
        bool negated = false;
        switch (f.cmp_op()) {
        case CmpOp::Eq: op = "="; break;
        case CmpOp::Ne: op = "="; negated = true; break;
        case CmpOp::Lt: op = "<"; break;
        case CmpOp::Le: op = "<="; break;
        case CmpOp::Gt: op = ">"; break;
        case CmpOp::Ge: op = ">="; break;
        }
        if (negated) out += "(not ";
        out += "(";
        out += op;
        out += " ";
        emit_term(f.cmp_lhs(), out);
        out += " ";
        emit_term(f.cmp_rhs(), out);
        out += ")";
        if (negated) out += ")";
        return;
    }
    case Formula::Kind::Not:
        out += "(not ";
        emit_formula(f.arg(), out);
        out += ")";
        return;
    case Formula::Kind::And:
    case Formula::Kind::Or: {
        if (f.args().empty()) {
            out += f.kind() == Formula::Kind::And ? "true" : "false";
            return;
        }
        if (f.args().size() == 1) {
            emit_formula(f.args()[0], out);
            return;
        }
        out += f.kind() == Formula::Kind::And ? "(and" : "(or";
        for (const auto& g : f.args()) {
            out += " ";
            emit_formula(g, out);
        }
        out += ")";
        return;
    }
    case Formula::Kind::Implies:
        out += "(=> ";
        emit_formula(f.lhs(), out);
        out += " ";
        emit_formula(f.rhs(), out);
        out += ")";
        return;
    case Formula::Kind::Iff:
        out += "(= ";
        emit_formula(f.lhs(), out);
        out += " ";
        emit_formula(f.rhs(), out);
        out += ")";
        return;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
        // Merge runs of like binders into one quantifier.
        out += f.kind() == Formula::Kind::Exists ? "(exists (" : "(forall (";
        out += "(" + mangle(f.bound()) + " Int)";
        Formula body = f.body();
        while (body.kind() == f.kind()) {
            out += " (" + mangle(body.bound()) + " Int)";
            body = body.body();
        }
        out += ") ";
        emit_formula(body, out);
        out += ")";
        return;
    }
    }
}

inline bool term_nonlinear(const Term& t) {
    switch (t.kind()) {
    case Term::Kind::Literal:
    case Term::Kind::Variable:
    case Term::Kind::Parameter: return false;
    case Term::Kind::Binary:
        if (t.op() == ArithOp::Mul && t.lhs().kind() != Term::Kind::Literal &&
            t.rhs().kind() != Term::Kind::Literal)
            return true;
        return term_nonlinear(t.lhs()) || term_nonlinear(t.rhs());
    }
    return false;
}

inline bool formula_nonlinear(const Formula& f) {
    switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return false;
    case Formula::Kind::Compare:
        return term_nonlinear(f.cmp_lhs()) || term_nonlinear(f.cmp_rhs());
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: return formula_nonlinear(f.body());
    default:
        for (const auto& g : f.args())
            if (formula_nonlinear(g)) return true;
        return false;
    }
}

// ---------------------------------------------------------------------------
// Child process driver: feed a script on stdin, collect stdout and stderr
// under a wall-clock deadline, kill the solver when the deadline passes.

struct RunResult {
    int exit_code = 0;       // negative: -signal
    bool timed_out = false;
    std::string out;
    std::string err;
};

inline RunResult run_process(const std::vector<std::string>& argv, const std::string& input,
                             int timeout_ms) {
    static const bool sigpipe_ignored = [] {
        ::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)sigpipe_ignored;

    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
        throw SolverError("pipe() failed: " + std::string(std::strerror(errno)));

    pid_t pid = fork();
    if (pid < 0) throw SolverError("fork() failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]})
            close(fd);
        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execvp(args[0], args.data());
        const char* msg = "exec failed\n";
        ssize_t ignored = write(STDERR_FILENO, msg, std::strlen(msg));
        (void)ignored;
        _exit(127);
    }

    close(in_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[1]);

    RunResult res;
    size_t written = 0;
    bool stdin_open = true, stdout_open = true, stderr_open = true;
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);

    while (stdout_open || stderr_open || stdin_open) {
        auto now = std::chrono::steady_clock::now();
        long remain =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        if (remain <= 0) {
            res.timed_out = true;
            kill(pid, SIGKILL);
            break;
        }
        std::array<pollfd, 3> fds{};
        nfds_t n = 0;
        if (stdin_open) fds[n++] = pollfd{in_pipe[1], POLLOUT, 0};
        if (stdout_open) fds[n++] = pollfd{out_pipe[0], POLLIN, 0};
        if (stderr_open) fds[n++] = pollfd{err_pipe[0], POLLIN, 0};
        int rc = poll(fds.data(), n, static_cast<int>(std::min<long>(remain, 1000)));
        if (rc < 0 && errno != EINTR)
            throw SolverError("poll() failed: " + std::string(std::strerror(errno)));
        for (nfds_t i = 0; i < n; ++i) {
            const pollfd& p = fds[i];
            if (p.revents == 0) continue;
            if (p.fd == in_pipe[1]) {
                if (p.revents & (POLLERR | POLLHUP)) {
                    close(in_pipe[1]);
                    stdin_open = false;
                    continue;
                }
                ssize_t w = write(in_pipe[1], input.data() + written,
                                  std::min<size_t>(input.size() - written, 65536));
                if (w < 0) {
                    if (errno == EPIPE || errno == ECONNRESET) {
                        close(in_pipe[1]);
                        stdin_open = false;
                    }
                } else {
                    written += size_t(w);
                    if (written == input.size()) {
                        close(in_pipe[1]);
                        stdin_open = false;
                    }
                }
            } else {
                char buf[65536];
                ssize_t r = read(p.fd, buf, sizeof buf);
                bool is_out = p.fd == out_pipe[0];
                if (r > 0) {
                    (is_out ? res.out : res.err).append(buf, size_t(r));
                } else if (r == 0 || (r < 0 && errno != EINTR && errno != EAGAIN)) {
                    close(p.fd);
                    (is_out ? stdout_open : stderr_open) = false;
                }
            }
        }
    }
    if (stdin_open) close(in_pipe[1]);
    if (stdout_open) close(out_pipe[0]);
    if (stderr_open) close(err_pipe[0]);

    int status = 0;
    waitpid(pid, &status, 0);
    if (WIFEXITED(status))
        res.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        res.exit_code = -WTERMSIG(status);
    return res;
}

}  // namespace detail

// Renders a formula as an SMT-LIB2 term (the body only, no declarations).
inline std::string to_smt2(const Formula& f) {
    std::string s;
    detail::emit_formula(f, s);
    return s;
}

// ---------------------------------------------------------------------------
// Solver session.

#ifndef FOREX_DEFAULT_SOLVER
#define FOREX_DEFAULT_SOLVER ""
#endif

// Picks the solver binary: explicit choice, then $FOREX_SOLVER, then z3 on
// PATH, then the compiled-in fallback (the bundled z3wasm script).
inline std::optional<std::string> resolve_solver_path(const std::string& explicit_path = "") {
    auto usable = [](const std::string& p) {
        return !p.empty() && access(p.c_str(), X_OK) == 0;
    };
    if (!explicit_path.empty()) return explicit_path;
    if (const char* env = std::getenv("FOREX_SOLVER"); env && *env) return std::string(env);
    if (const char* path = std::getenv("PATH")) {
        std::string p(path);
        size_t start = 0;
        while (start <= p.size()) {
            size_t end = p.find(':', start);
            if (end == std::string::npos) end = p.size();
            std::string dir = p.substr(start, end - start);
            if (!dir.empty() && usable(dir + "/z3")) return dir + "/z3";
            start = end + 1;
        }
    }
    if (usable(FOREX_DEFAULT_SOLVER)) return std::string(FOREX_DEFAULT_SOLVER);
    return std::nullopt;
}

class Solver {
public:
    explicit Solver(std::string path, int timeout_ms = 10000,
                    std::optional<std::string> dump_dir = std::nullopt)
        : path_(std::move(path)), timeout_ms_(timeout_ms), dump_dir_(std::move(dump_dir)) {}

    const SolverStats& stats() const { return stats_; }
    const std::string& last_script() const { return last_script_; }
    const std::string& path() const { return path_; }
    int timeout_ms() const { return timeout_ms_; }

    // Runs one SMT-LIB2 script. If model_out is non-null and the result is
    // Sat, everything the solver printed after the verdict line lands there.
    SolverResult raw_check(const std::string& script, std::string* model_out = nullptr) {
        last_script_ = script;
        if (dump_dir_) {
            std::filesystem::create_directories(*dump_dir_);
            std::ofstream f(*dump_dir_ + "/query_" + std::to_string(seq_++) + ".smt2");
            f << script;
        }
        const auto t0 = std::chrono::steady_clock::now();
        detail::RunResult run = detail::run_process({path_, "-in", "-smt2"}, script, timeout_ms_);
        const auto t1 = std::chrono::steady_clock::now();
        ++stats_.queries;
        stats_.total_ms +=
            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
        if (run.timed_out) {
            ++stats_.timeouts;
            ++stats_.unknown;
            return SolverResult::Unknown;
        }
        // Scan for the verdict line; solvers may print warnings around it.
        size_t pos = 0;
        while (pos <= run.out.size()) {
            size_t eol = run.out.find('\n', pos);
            std::string line = run.out.substr(pos, eol == std::string::npos ? eol : eol - pos);
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
            if (line == "sat" || line == "unsat" || line == "unknown") {
                if (line == "sat") {
                    ++stats_.sat;
                    if (model_out && eol != std::string::npos)
                        *model_out = run.out.substr(eol + 1);
                    return SolverResult::Sat;
                }
                if (line == "unsat") {
                    ++stats_.unsat;
                    return SolverResult::Unsat;
                }
                ++stats_.unknown;
                return SolverResult::Unknown;
            }
            if (eol == std::string::npos) break;
            pos = eol + 1;
        }
        std::string what = "solver produced no verdict (exit " +
                           std::to_string(run.exit_code) + ")";
        if (!run.err.empty()) what += "; stderr: " + run.err.substr(0, 500);
        if (!run.out.empty()) what += "; stdout: " + run.out.substr(0, 500);
        throw SolverError(what);
    }

    // Satisfiability of a closed formula. Validity and satisfiability agree
    // on closed formulas, so Sat means "true".
    SolverResult check_closed(const Formula& f) {
        if (!free_vars(f).empty() || !free_params(f).empty())
            throw std::logic_error("check_closed: formula has free symbols: " + to_string(f));
        return raw_check(build_script(f, /*get_model=*/false));
    }

    // Satisfiability of a restriction; free parameters become constants.
    SolverResult check_restriction_sat(const Formula& c) {
        return raw_check(build_script(c, /*get_model=*/false));
    }

    // Logical equivalence; free symbols are treated as shared constants
    // (equivalence must hold for every value). On failure, a model showing
    // the difference is available via model_out.
    SolverResult check_equiv_raw(const Formula& a, const Formula& b,
                                 std::string* model_out = nullptr) {
        Formula neg = Formula::negate(Formula::iff(a, b));
        return raw_check(build_script(neg, /*get_model=*/true), model_out);
    }

    bool check_equiv(const Formula& a, const Formula& b, std::string* model_out = nullptr) {
        SolverResult r = check_equiv_raw(a, b, model_out);
        if (r == SolverResult::Unknown)
            throw SolverError("solver returned unknown on an equivalence query");
        return r == SolverResult::Unsat;
    }

    std::string build_script(const Formula& f, bool get_model) const {
        std::string s;
        s += detail::formula_nonlinear(f) ? "(set-logic NIA)\n" : "(set-logic LIA)\n";
        for (const auto& v : free_vars(f))
            s += "(declare-const " + detail::mangle(v) + " Int)\n";
        for (const auto& p : free_params(f))
            s += "(declare-const " + detail::mangle(p) + " Int)\n";
        s += "(assert ";
        detail::emit_formula(f, s);
        s += ")\n(check-sat)\n";
        if (get_model) s += "(get-model)\n";
        return s;
    }

private:
    std::string path_;
    int timeout_ms_;
    std::optional<std::string> dump_dir_;
    SolverStats stats_;
    std::string last_script_;
    long seq_ = 0;
};

// ---------------------------------------------------------------------------
// The closing validity query: for all final states of the universal copies
// there is a parameter choice, admitted by the restriction, under which every
// state tuple satisfying the postcondition template also satisfies the
// postcondition proper.

inline Formula build_final_query(const std::vector<std::vector<VarName>>& univ_vars,
                                 const std::vector<std::vector<VarName>>& exist_vars,
                                 const std::vector<Param>& params, const Formula& restriction,
                                 const Formula& xi, const Formula& post) {
    Formula inner = Formula::implies(xi, post);
    for (auto vs = exist_vars.rbegin(); vs != exist_vars.rend(); ++vs)
        for (auto v = vs->rbegin(); v != vs->rend(); ++v)
            inner = Formula::forall(Symbol{*v}, std::move(inner));
    Formula mid = Formula::conj2(restriction, std::move(inner));
    for (auto p = params.rbegin(); p != params.rend(); ++p)
        mid = Formula::exists(Symbol{*p}, std::move(mid));
    for (auto vs = univ_vars.rbegin(); vs != univ_vars.rend(); ++vs)
        for (auto v = vs->rbegin(); v != vs->rend(); ++v)
            mid = Formula::forall(Symbol{*v}, std::move(mid));
    return mid;
}

}  // namespace forex
