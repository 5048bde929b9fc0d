// One-level orthonormal discrete wavelet transforms in 1D and 3D.
//
// The 3D transform splits a tensor into 8 half-size sub-bands, one per
// combination of low/high-pass filtering along the (t, r, c) axes.  Haar is
// the workhorse basis; db2/db4/db6 are bundled for the wavelet-family
// ablation.  General bases use periodic (circular) boundary extension, which
// keeps the transform exactly orthonormal for every even axis length.
//
// Index conventions (both orthonormal, both used deliberately):
//   * dwt1_haar / idwt1_haar pair samples as (x[2k], x[2k+1]) with
//     detail = (x[2k] - x[2k+1]) / sqrt(2)   (0-based k).
//   * dwt3 / idwt3 apply per-axis filters in convolution orientation,
//     out[k] = sum_i h[i] * x[(2k+1-i) mod T], whose Haar detail is
//     (x[2k+1] - x[2k]) / sqrt(2).  This is the 3D sub-band convention
//     (-1)^{xi.n} X_{2k-n}; it differs from the 1D pair by the sign of the
//     detail channel.  Sub-band energies, reconstruction, and every isometry
//     property are identical under either orientation.

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "fable/tensor.hpp"

namespace fable::wavelet {

// Sub-band codes; the enum value packs xi = (xi_t, xi_r, xi_c) as bits
// (t highest), so LLL=0 ... HHH=7 and band_xi recovers the triple.
enum class SubBand : int {
  LLL = 0,
  LLH = 1,
  LHL = 2,
  LHH = 3,
  HLL = 4,
  HLH = 5,
  HHL = 6,
  HHH = 7,
};

constexpr std::array<SubBand, 8> kAllBands = {
    SubBand::LLL, SubBand::LLH, SubBand::LHL, SubBand::LHH,
    SubBand::HLL, SubBand::HLH, SubBand::HHL, SubBand::HHH};

const char* band_name(SubBand f);
SubBand band_from_name(const std::string& name);  // throws UnknownBand
std::array<int, 3> band_xi(SubBand f);

struct WaveletBasis {
  std::string name;
  std::vector<double> lowpass;
  std::vector<double> highpass;

  static WaveletBasis haar();
  static WaveletBasis db2();
  static WaveletBasis db4();
  static WaveletBasis db6();
  static WaveletBasis by_name(const std::string& name);  // "haar", "db2", ...

  // Builds the conjugate-quadrature pair h_H[i] = (-1)^i h_L[L-1-i] from a
  // lowpass filter and validates the orthonormality invariants.
  static WaveletBasis from_lowpass(std::string name, std::vector<double> taps);
};

// Checks sum of squared taps == 1, even-shift orthogonality, and the
// alternating-flip highpass relation, each to 1e-12.  Throws BadBasis.
void validate(const WaveletBasis& basis);

struct WaveletCoeffs {
  std::array<Tensor3, 8> bands;  // indexed by static_cast<int>(SubBand)
  Dims3 source_dims;             // dims of the analyzed tensor before padding

  const Tensor3& band(SubBand f) const { return bands[static_cast<int>(f)]; }
  Tensor3& band(SubBand f) { return bands[static_cast<int>(f)]; }
  Dims3 band_dims() const { return bands[0].dims(); }
};

// 1D Haar pair on an even-length signal.
//   approx[k] = (x[2k] + x[2k+1]) / sqrt(2)
//   detail[k] = (x[2k] - x[2k+1]) / sqrt(2)
// Throws OddLength for odd or empty input.
std::pair<std::vector<double>, std::vector<double>> dwt1_haar(
    const std::vector<double>& signal);

// Exact inverse of dwt1_haar.  Throws LengthMismatch.
std::vector<double> idwt1_haar(const std::vector<double>& approx,
                               const std::vector<double>& detail);

// One-level 3D analysis: filters axis t, then r, then c.  All dims must be
// even (OddDim) unless pad_odd is set, in which case odd axes are extended
// by edge replication and source_dims records the original shape so idwt3
// can crop.
WaveletCoeffs dwt3(const Tensor3& x, const WaveletBasis& basis,
                   bool pad_odd = false);

// One-level 3D synthesis; exact left inverse of dwt3.  Throws
// IncompleteBands if band dims disagree or source_dims is inconsistent.
Tensor3 idwt3(const WaveletCoeffs& coeffs, const WaveletBasis& basis);

// Weighted sum over bands of the l2 distance per band:
//   sum_f omega[f] * ||C^f - C'^f||_2
// (a sum of per-band norms, not the norm of the concatenation).
double coeff_distance(const WaveletCoeffs& a, const WaveletCoeffs& b,
                      const std::array<double, 8>& omega);

// Container file: u32 little-endian header length, a JSON index header
// mapping band name to the byte offset of that band's ST3D block (offsets
// measured from the end of the header) plus the source dims, then the 8
// blocks.  Writing is byte-deterministic.
void write_coeffs_file(const std::filesystem::path& path,
                       const WaveletCoeffs& coeffs);
WaveletCoeffs read_coeffs_file(const std::filesystem::path& path);

}  // namespace fable::wavelet
