// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return lp::cli::run(argc, argv, std::cout, std::cerr); }
