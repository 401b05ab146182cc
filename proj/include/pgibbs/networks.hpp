#pragma once

// Small diagnostic networks used throughout the tests and examples. The
// same networks ship as JSON under data/networks/.

#include "pgibbs/model.hpp"

namespace pgibbs::networks {

/// Two diseases (leak 0.1) feeding one symptom (leak 0) through deterministic
/// links; the symptom is observed on.
Network two_disease();

/// Three diseases and three observed-on symptoms, each symptom caused by a
/// different pair of diseases. Disease and symptom leaks are parameters.
Network disease_triangle(double disease_leak = 0.1, double symptom_leak = 0.0);

/// disease_triangle with every leak at 0.001.
inline Network extreme_triangle() { return disease_triangle(0.001, 0.001); }

}  // namespace pgibbs::networks
