#include "nhreal/nhreal.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "nhreal/eig.hpp"
#include "nhreal/laser.hpp"
#include "nhreal/model.hpp"
#include "nhreal/scenario.hpp"
#include "nhreal/serialize.hpp"
#include "nhreal/spectra.hpp"

struct nhr_matrix {
  nhreal::ComplexMatrix m;
};

struct nhr_eigensystem {
  nhreal::eig::EigenSystem es;
};

namespace {

thread_local std::string g_last_error;

nhr_status to_status(nhreal::ErrorCode code) {
  using nhreal::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return NHR_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return NHR_ERR_DIMENSION_MISMATCH;
    case ErrorCode::Singular: return NHR_ERR_SINGULAR;
    case ErrorCode::NotPsd: return NHR_ERR_NOT_PSD;
    case ErrorCode::NoConvergence: return NHR_ERR_NO_CONVERGENCE;
    case ErrorCode::NoZeroMode: return NHR_ERR_NO_ZERO_MODE;
    case ErrorCode::NoThreshold: return NHR_ERR_NO_THRESHOLD;
    case ErrorCode::Degenerate: return NHR_ERR_DEGENERATE;
    case ErrorCode::AmbiguousTracking: return NHR_ERR_AMBIGUOUS_TRACKING;
    case ErrorCode::Config: return NHR_ERR_CONFIG;
    case ErrorCode::Io: return NHR_ERR_IO;
  }
  return NHR_ERR_INTERNAL;
}

template <class F>
nhr_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return NHR_OK;
  } catch (const nhreal::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("json: ") + e.what();
    return NHR_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return NHR_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NHR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return NHR_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw nhreal::Error(nhreal::ErrorCode::InvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json parse(const char* text, const char* what) {
  require(text != nullptr, what);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw nhreal::Error(nhreal::ErrorCode::Config, std::string(what) + ": " + e.what());
  }
}

void export_matrix(const nhreal::ComplexMatrix& m, double* re, double* im) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const auto k = static_cast<std::size_t>(r * m.cols() + c);
      if (re) re[k] = m(r, c).real();
      if (im) im[k] = m(r, c).imag();
    }
  }
}

}  // namespace

extern "C" {

const char* nhr_version(void) { return "0.1.0"; }

const char* nhr_status_string(nhr_status status) {
  switch (status) {
    case NHR_OK: return "ok";
    case NHR_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NHR_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case NHR_ERR_SINGULAR: return "singular matrix";
    case NHR_ERR_NOT_PSD: return "not positive semi-definite";
    case NHR_ERR_NO_CONVERGENCE: return "no convergence";
    case NHR_ERR_NO_ZERO_MODE: return "no zero mode";
    case NHR_ERR_NO_THRESHOLD: return "no lasing threshold";
    case NHR_ERR_DEGENERATE: return "degenerate";
    case NHR_ERR_AMBIGUOUS_TRACKING: return "ambiguous mode tracking";
    case NHR_ERR_CONFIG: return "configuration error";
    case NHR_ERR_IO: return "i/o error";
    case NHR_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* nhr_last_error(void) { return g_last_error.c_str(); }

void nhr_string_free(char* s) { std::free(s); }

nhr_status nhr_matrix_create(size_t rows, size_t cols, const double* re, const double* im,
                             nhr_matrix** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    require(re != nullptr, "re must not be NULL");
    require(rows > 0 && cols > 0, "matrix must be nonempty");
    auto* h = new nhr_matrix{nhreal::ComplexMatrix(static_cast<Eigen::Index>(rows),
                                                   static_cast<Eigen::Index>(cols))};
    for (size_t r = 0; r < rows; ++r) {
      for (size_t c = 0; c < cols; ++c) {
        const size_t k = r * cols + c;
        h->m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            nhreal::cd(re[k], im ? im[k] : 0.0);
      }
    }
    *out = h;
  });
}

void nhr_matrix_free(nhr_matrix* m) { delete m; }

nhr_status nhr_matrix_shape(const nhr_matrix* m, size_t* rows, size_t* cols) {
  return guarded([&] {
    require(m && rows && cols, "NULL argument");
    *rows = static_cast<size_t>(m->m.rows());
    *cols = static_cast<size_t>(m->m.cols());
  });
}

nhr_status nhr_matrix_data(const nhr_matrix* m, double* re, double* im) {
  return guarded([&] {
    require(m && re, "NULL argument");
    export_matrix(m->m, re, im);
  });
}

nhr_status nhr_lattice_build(const char* lattice_json, nhr_matrix** h0, nhr_matrix** a) {
  return guarded([&] {
    require(h0 && a, "NULL output");
    const auto spec = nhreal::io::lattice_from_json(parse(lattice_json, "lattice_json"));
    auto m0 = std::make_unique<nhr_matrix>(nhr_matrix{nhreal::model::build_h0(spec)});
    auto ma = std::make_unique<nhr_matrix>(nhr_matrix{nhreal::model::build_scaling(spec)});
    *h0 = m0.release();
    *a = ma.release();
  });
}

nhr_status nhr_construct_product(const nhr_matrix* h0, const nhr_matrix* a, nhr_matrix** out) {
  return guarded([&] {
    require(h0 && a && out, "NULL argument");
    *out = new nhr_matrix{nhreal::model::construct_product(h0->m, a->m)};
  });
}

nhr_status nhr_construct_gauge(const nhr_matrix* h0, const nhr_matrix* a, nhr_matrix** out) {
  return guarded([&] {
    require(h0 && a && out, "NULL argument");
    *out = new nhr_matrix{nhreal::model::construct_gauge(h0->m, a->m)};
  });
}

nhr_status nhr_eig(const nhr_matrix* m, nhr_eigensystem** out) {
  return guarded([&] {
    require(m && out, "NULL argument");
    *out = new nhr_eigensystem{nhreal::eig::eig_full(m->m)};
  });
}

void nhr_eigensystem_free(nhr_eigensystem* es) { delete es; }

size_t nhr_eigensystem_dim(const nhr_eigensystem* es) { return es ? es->es.dim : 0; }

nhr_status nhr_eigensystem_eigenvalues(const nhr_eigensystem* es, double* re, double* im) {
  return guarded([&] {
    require(es && re && im, "NULL argument");
    for (size_t u = 0; u < es->es.dim; ++u) {
      re[u] = es->es.eigenvalues[u].real();
      im[u] = es->es.eigenvalues[u].imag();
    }
  });
}

nhr_status nhr_eigensystem_vectors(const nhr_eigensystem* es, int left, double* re, double* im) {
  return guarded([&] {
    require(es && re && im, "NULL argument");
    export_matrix(left ? es->es.left : es->es.right, re, im);
  });
}

nhr_status nhr_eigensystem_json(const nhr_eigensystem* es, char** out_json) {
  return guarded([&] {
    require(es && out_json, "NULL argument");
    *out_json = dup_string(nhreal::io::to_json(es->es).dump());
  });
}

nhr_status nhr_certify_json(const nhr_matrix* h, const nhr_matrix* h0, char** out_json) {
  return guarded([&] {
    require(h && h0 && out_json, "NULL argument");
    *out_json = dup_string(nhreal::io::to_json(nhreal::spectra::certify(h->m, h0->m)).dump());
  });
}

nhr_status nhr_ep_json(const nhr_matrix* h, double target_re, double target_im, char** out_json) {
  return guarded([&] {
    require(h && out_json, "NULL argument");
    const auto ep = nhreal::spectra::ep_analyze(h->m, nhreal::cd(target_re, target_im));
    *out_json = dup_string(nhreal::io::to_json(ep).dump());
  });
}

nhr_status nhr_find_threshold(const nhr_matrix* h, const char* pump_json, double* threshold,
                              char** report_json) {
  return guarded([&] {
    require(h && threshold, "NULL argument");
    const auto pump = nhreal::io::pump_from_json(parse(pump_json, "pump_json"));
    const auto r = nhreal::laser::find_threshold(h->m, pump);
    *threshold = r.threshold;
    if (report_json) *report_json = dup_string(nhreal::io::to_json(r).dump());
  });
}

nhr_status nhr_run_scenario(const char* config_json, char** report_json, int* all_passed) {
  return guarded([&] {
    const auto cfg = nhreal::scenario::config_from_json(parse(config_json, "config_json"));
    const auto result = nhreal::scenario::run(cfg);
    if (all_passed) *all_passed = result.passed() ? 1 : 0;
    if (report_json) *report_json = dup_string(result.report().dump());
  });
}

nhr_status nhr_scenario_names(char** out_json) {
  return guarded([&] {
    require(out_json != nullptr, "NULL argument");
    *out_json = dup_string(nlohmann::json(nhreal::scenario::scenario_names()).dump());
  });
}

nhr_status nhr_default_tolerances(char** out_json) {
  return guarded([&] {
    require(out_json != nullptr, "NULL argument");
    *out_json = dup_string(nlohmann::json(nhreal::Tolerances{}.as_map()).dump());
  });
}

}  // extern "C"
