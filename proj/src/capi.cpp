#include "cbsforge/cbsforge.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "cbsforge/json_io.hpp"
#include "cbsforge/report.hpp"
#include "cbsforge/rng.hpp"
#include "cbsforge/suites.hpp"

struct cbs_input {
  cbsforge::CbsInput value;
};

struct cbs_report {
  cbsforge::RunReport value;
};

namespace {

thread_local std::string last_error;

cbs_status set_error(cbs_status status, const std::string& message) {
  last_error = message;
  return status;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class F>
cbs_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return CBS_OK;
  } catch (const cbsforge::Error& e) {
    return set_error(static_cast<cbs_status>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(CBS_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(CBS_ERR_RESOURCE_EXCEEDED, "out of memory");
  } catch (const std::exception& e) {
    return set_error(CBS_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(CBS_ERR_INTERNAL, "unknown error");
  }
}

}  // namespace

extern "C" {

const char* cbs_version(void) { return cbsforge::tool_version; }

const char* cbs_status_name(cbs_status status) {
  switch (status) {
    case CBS_OK: return "ok";
    case CBS_ERR_INDEX: return "index_error";
    case CBS_ERR_SHAPE_MISMATCH: return "shape_mismatch";
    case CBS_ERR_RESOURCE_EXCEEDED: return "resource_exceeded";
    case CBS_ERR_DOMAIN: return "domain_error";
    case CBS_ERR_PRECONDITION: return "precondition_failed";
    case CBS_ERR_NUMERICAL_INTEGRITY: return "numerical_integrity";
    case CBS_ERR_PARSE: return "parse_error";
    case CBS_ERR_IO: return "io_error";
    case CBS_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case CBS_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

const char* cbs_last_error(void) { return last_error.c_str(); }

void cbs_string_free(char* s) { std::free(s); }

cbs_status cbs_input_from_json(const char* json, cbs_input** out) {
  if (!json || !out) return set_error(CBS_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new cbs_input{cbsforge::cbs_input_from_json(nlohmann::json::parse(json))};
  });
}

cbs_status cbs_input_random(const size_t* dims, size_t m, size_t n, uint64_t seed,
                            cbs_input** out) {
  if (!dims || !out || m == 0 || n == 0)
    return set_error(CBS_ERR_INVALID_ARGUMENT, "dims, m, n and out are required");
  *out = nullptr;
  return guarded([&] {
    const cbsforge::DimVector shape(std::vector<std::size_t>(dims, dims + m));
    std::vector<cbsforge::Hypermatrix> xs, us;
    for (size_t k = 0; k < n; ++k) {
      xs.push_back(cbsforge::random_hypermatrix(shape, cbsforge::derive_seed(seed, 2 * k),
                                                cbsforge::Distribution::complex_gaussian));
      us.push_back(cbsforge::random_hypermatrix(shape, cbsforge::derive_seed(seed, 2 * k + 1),
                                                cbsforge::Distribution::complex_gaussian));
    }
    *out = new cbs_input{cbsforge::CbsInput(std::move(xs), std::move(us))};
  });
}

void cbs_input_free(cbs_input* input) { delete input; }

cbs_status cbs_input_shape(const cbs_input* input, size_t* m, size_t* dims, size_t* n) {
  if (!input || !m || !n) return set_error(CBS_ERR_INVALID_ARGUMENT, "null argument");
  const auto& shape = input->value.shape();
  *m = shape.rank();
  *n = input->value.n();
  if (dims)
    for (size_t k = 0; k < shape.rank(); ++k) dims[k] = shape[k];
  return CBS_OK;
}

cbs_status cbs_input_to_json(const cbs_input* input, char** out) {
  if (!input || !out) return set_error(CBS_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = copy_string(cbsforge::to_json(input->value).dump()); });
}

cbs_status cbs_phi(const cbs_input* input, double budget, double* total,
                   double* cancellation_mass) {
  if (!input || !total) return set_error(CBS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto b =
        cbsforge::phi(input->value, budget > 0.0 ? budget : cbsforge::default_work_budget);
    *total = b.total;
    if (cancellation_mass) *cancellation_mass = b.cancellation_mass;
  });
}

cbs_status cbs_run(const char* command, const char* config_json, cbs_report** out) {
  if (!command || !out) return set_error(CBS_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const nlohmann::json cfg =
        config_json ? nlohmann::json::parse(config_json) : nlohmann::json::object();
    *out = new cbs_report{cbsforge::run_command(command, cfg)};
  });
}

int cbs_report_passed(const cbs_report* report) { return report && report->value.pass() ? 1 : 0; }

cbs_status cbs_report_json(const cbs_report* report, int indent, char** out) {
  if (!report || !out) return set_error(CBS_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = copy_string(report->value.to_json().dump(indent)); });
}

void cbs_report_free(cbs_report* report) { delete report; }

}  // extern "C"
