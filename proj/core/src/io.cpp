#include "kvwave/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kvwave {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void write_trace_csv(const std::string& path, const EnergyTrace& trace) {
  std::ofstream out = open_out(path);
  out << "t,energy,dissipation\n";
  for (size_t i = 0; i < trace.times.size(); ++i) {
    out << fmt17(trace.times[i]) << ',' << fmt17(trace.energies[i]) << ','
        << fmt17(trace.dissipations[i]) << '\n';
  }
  finish(out, path);
}

void write_spectrum_csv(const std::string& path,
                        const SpectrumReport& report) {
  std::ofstream out = open_out(path);
  out << "k,mu,re_exact,im_exact,re_asym,im_asym,abs_re_times_mu2,rel_gap\n";
  for (const auto& rec : report.records) {
    out << rec.k << ',' << fmt17(rec.mu) << ',' << fmt17(rec.exact.real())
        << ',' << fmt17(rec.exact.imag()) << ',' << fmt17(rec.asym.real())
        << ',' << fmt17(rec.asym.imag()) << ','
        << fmt17(rec.abs_re_times_mu2) << ',' << fmt17(rec.rel_gap) << '\n';
  }
  finish(out, path);
}

void write_sweep_csv(const std::string& path, const ResolventSweep& sweep) {
  std::ofstream out = open_out(path);
  out << "lambda,norm,residual,flagged\n";
  for (size_t i = 0; i < sweep.lambdas.size(); ++i) {
    out << fmt17(sweep.lambdas[i]) << ',' << fmt17(sweep.norms[i]) << ','
        << fmt17(sweep.solve_residuals[i]) << ',' << sweep.flags[i] << '\n';
  }
  finish(out, path);
}

void write_matrix_coo(const std::string& path, const SpMat& m) {
  std::ofstream out = open_out(path);
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << fmt17(it.value()) << '\n';
    }
  }
  finish(out, path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out = open_out(path);
  out << content;
  finish(out, path);
}

}  // namespace kvwave
