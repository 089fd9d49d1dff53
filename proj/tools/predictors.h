#ifndef VINESHAP_TOOLS_PREDICTORS_H_
#define VINESHAP_TOOLS_PREDICTORS_H_

#include <string>

#include "vineshap/explain.h"

namespace vineshap::cli {

// Built-in predictors by name:
//   const:C            g(x) = C
//   linear:b0,b1,...   g(x) = b0 + sum_j b_j x_j
//   burr-mean:P        noiseless response mean of the Burr benchmark with
//                      the standard b and r vectors and p = P
Predictor BuiltinPredictor(const std::string& spec, int dim);

// External predictor. For every batch the query points are written as CSV
// (header row with `columns`, one row per point) to the command's standard
// input; the command must print exactly one number per line.
Predictor ProcessPredictor(const std::string& command, std::vector<std::string> columns);

}  // namespace vineshap::cli

#endif  // VINESHAP_TOOLS_PREDICTORS_H_
