// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ast.hpp"
#include "formula.hpp"
#include "simplify.hpp"
#include "feht.hpp"
#include "interp.hpp"
#include "parse.hpp"
#include "smt.hpp"
#include "genpp.hpp"
#include "verify.hpp"
