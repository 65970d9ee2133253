#pragma once

#include "fibreg/fib_core.hpp"
#include "fibreg/int_linalg.hpp"
#include "fibreg/kernel_rank.hpp"
#include "fibreg/lengyel.hpp"
#include "fibreg/linear_rep.hpp"
#include "fibreg/parallel.hpp"
#include "fibreg/relations.hpp"
#include "fibreg/representations.hpp"
