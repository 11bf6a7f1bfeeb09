#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tricorr/bigfloat.hpp"
#include "tricorr/forms.hpp"

namespace tricorr {

enum class KernelKind { exponential, sharp, omega };
const char* to_string(KernelKind k);

struct Cuts {
  std::uint64_t m_cut = 0;
  std::uint64_t h_cut = 0;
};

// Weight attached to the term (m, h) of sum a(h) b(m) c(2m - h):
//   exponential: e^{-m/X} e^{-h/Y}, truncated at m <= ceil(T X), h <= ceil(T Y)
//   sharp:       [m <= X] [h <= Y]
//   omega:       h^{-q} [m <= X] [h <= 2X], q = k/2 + 3/2
struct SmoothingKernel {
  KernelKind kind = KernelKind::exponential;
  double X = 1.0;
  double Y = 1.0;
  double omega_exponent = 0.0;
  double tail_factor = 40.0;

  static SmoothingKernel exponential(double X, double Y, double tail_factor = 40.0);
  static SmoothingKernel sharp(double X, double Y);
  // Y is fixed to 2X; the exponent is k/2 + 3/2 for weight k.
  static SmoothingKernel omega(double X, double weight);

  // Double-precision weight, for diagnostics and oracles.
  double weight(std::uint64_t m, std::uint64_t h) const;
  Cuts cuts() const;
};

enum class SumMethod { direct, fft };
enum class FftPrecision { double_precision, extended };
const char* to_string(SumMethod m);

struct SumOptions {
  long precision_bits = 256;
  // Overrides the kernel's truncation (exponential kernel only).
  std::optional<Cuts> cuts;
  // Keep the h = 2m boundary term c(0) when the third sequence has one
  // (theta); cusp forms have c(0) = 0 either way.
  bool include_zero_index = true;
  FftPrecision fft_precision = FftPrecision::double_precision;
};

struct TripleSumResult {
  BigFloat value{64};
  SumMethod method = SumMethod::direct;
  std::uint64_t terms_used = 0;
  std::uint64_t m_cut = 0;
  std::uint64_t h_cut = 0;
  long precision_bits = 0;
  // Relative error bound: truncation tail plus arithmetic rounding.
  double est_rel_err = 0.0;
  // Absolute components of est_rel_err * |value|.
  double tail_bound = 0.0;
  double rounding_bound = 0.0;
  // Approximate sum of |weighted terms| inside the cuts.
  double abs_sum = 0.0;
  std::vector<std::string> warnings;

  std::string value_string(int digits = 0) const { return value.to_string(digits); }
};

// Largest coefficient index needed from each sequence; throws CoverageError
// naming the required n_max when any view is too short.
std::uint64_t required_n_max(const SmoothingKernel& kernel, const SumOptions& opt = {});

TripleSumResult triple_sum_direct(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3,
                                  const SmoothingKernel& kernel, const SumOptions& opt = {});
TripleSumResult triple_sum_fft(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3,
                               const SmoothingKernel& kernel, const SumOptions& opt = {});
// sum_{m <= X} sum_{h <= 2X} a(h) b(m) c(2m-h) / h^{k/2+3/2}, k the weight of f1.
TripleSumResult omega_sum(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3, double X,
                          const SumOptions& opt = {});

// Rigorous majorant of the omitted terms of the exponential-kernel sum
// outside [1, m_cut] x [1, h_cut], from |c(n)| <= C n^beta.
double exponential_tail_bound(const Majorant& a, const Majorant& b, const Majorant& c, double X, double Y,
                              std::uint64_t m_cut, std::uint64_t h_cut);

}  // namespace tricorr
