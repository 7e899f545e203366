#pragma once

// Umbrella header.

#include "accltl/analyses.hpp"
#include "accltl/automaton.hpp"
#include "accltl/classify.hpp"
#include "accltl/compile.hpp"
#include "accltl/datalog.hpp"
#include "accltl/error.hpp"
#include "accltl/eval.hpp"
#include "accltl/implication.hpp"
#include "accltl/instance.hpp"
#include "accltl/logic.hpp"
#include "accltl/ltl0.hpp"
#include "accltl/parser.hpp"
#include "accltl/path.hpp"
#include "accltl/progressive.hpp"
#include "accltl/reduce.hpp"
#include "accltl/schema.hpp"
#include "accltl/sexpr.hpp"
#include "accltl/value.hpp"
