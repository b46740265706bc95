#pragma once

#include "kvwave/dynamics.hpp"
#include "kvwave/resolvent.hpp"
#include "kvwave/spectral.hpp"

#include <string>

namespace kvwave {

// Shortest round-trip decimal form (%.17g); CSV output is byte-stable for
// identical inputs.
std::string fmt17(double x);

// "t,energy,dissipation"
void write_trace_csv(const std::string& path, const EnergyTrace& trace);

// "k,mu,re_exact,im_exact,re_asym,im_asym,abs_re_times_mu2,rel_gap"
void write_spectrum_csv(const std::string& path, const SpectrumReport& report);

// "lambda,norm,residual,flagged"
void write_sweep_csv(const std::string& path, const ResolventSweep& sweep);

// One "row col value" triplet per line, 0-based indices.
void write_matrix_coo(const std::string& path, const SpMat& m);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace kvwave
