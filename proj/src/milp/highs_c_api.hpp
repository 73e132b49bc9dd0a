#pragma once

// Subset of the HiGHS C interface. The library ships without headers in the
// Python wheel we link against, so the prototypes are declared here; they
// match highs_c_api.h of HiGHS 1.15 built with 32-bit HighsInt.

#include <cstdint>

extern "C" {

typedef std::int32_t HighsInt;

void* Highs_create(void);
void Highs_destroy(void* highs);
const char* Highs_version(void);
HighsInt Highs_getSizeofHighsInt(const void* highs);

HighsInt Highs_passMip(void* highs, HighsInt num_col, HighsInt num_row, HighsInt num_nz, HighsInt a_format,
                       HighsInt sense, double offset, const double* col_cost, const double* col_lower,
                       const double* col_upper, const double* row_lower, const double* row_upper,
                       const HighsInt* a_start, const HighsInt* a_index, const double* a_value,
                       const HighsInt* integrality);
HighsInt Highs_readModel(void* highs, const char* filename);
HighsInt Highs_run(void* highs);

HighsInt Highs_setBoolOptionValue(void* highs, const char* option, HighsInt value);
HighsInt Highs_setIntOptionValue(void* highs, const char* option, HighsInt value);
HighsInt Highs_setDoubleOptionValue(void* highs, const char* option, double value);
HighsInt Highs_setStringOptionValue(void* highs, const char* option, const char* value);

HighsInt Highs_setSolution(void* highs, const double* col_value, const double* row_value, const double* col_dual,
                           const double* row_dual);
HighsInt Highs_getSolution(const void* highs, double* col_value, double* col_dual, double* row_value,
                           double* row_dual);
HighsInt Highs_getModelStatus(const void* highs);
double Highs_getObjectiveValue(const void* highs);
HighsInt Highs_getDoubleInfoValue(const void* highs, const char* info, double* value);
HighsInt Highs_getIntInfoValue(const void* highs, const char* info, HighsInt* value);
double Highs_getInfinity(const void* highs);
double Highs_getRunTime(const void* highs);
HighsInt Highs_getNumCol(const void* highs);
HighsInt Highs_getColByName(const void* highs, const char* name, HighsInt* col);
}

namespace highs_c {

inline constexpr HighsInt kStatusError = -1;
inline constexpr HighsInt kVarContinuous = 0;
inline constexpr HighsInt kVarInteger = 1;
inline constexpr HighsInt kMinimize = 1;
inline constexpr HighsInt kRowwise = 2;

enum ModelStatus : HighsInt {
  kNotset = 0,
  kLoadError = 1,
  kModelError = 2,
  kPresolveError = 3,
  kSolveError = 4,
  kPostsolveError = 5,
  kModelEmpty = 6,
  kOptimal = 7,
  kInfeasible = 8,
  kUnboundedOrInfeasible = 9,
  kUnbounded = 10,
  kObjectiveBound = 11,
  kObjectiveTarget = 12,
  kTimeLimit = 13,
  kIterationLimit = 14,
  kUnknown = 15,
  kSolutionLimit = 16,
  kInterrupt = 17,
};

}  // namespace highs_c
