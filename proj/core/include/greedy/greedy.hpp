#pragma once

#include "greedy/diagnostics.hpp"
#include "greedy/dictionary.hpp"
#include "greedy/eim.hpp"
#include "greedy/error.hpp"
#include "greedy/function_space.hpp"
#include "greedy/simplex.hpp"
#include "greedy/sparse_greedy.hpp"
#include "greedy/trace.hpp"
