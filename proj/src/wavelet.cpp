#include "fable/wavelet.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fable/error.hpp"
#include "fable/io.hpp"

namespace fable::wavelet {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

// Orthonormal Daubechies scaling filters, extremal-phase family, computed by
// spectral factorization of the Daubechies half-band polynomial at 60-digit
// working precision and rounded once to double.  validate() re-checks the
// conjugate-quadrature conditions on every construction, so a transcription
// error here cannot pass silently.
constexpr double kDb2[4] = {
    4.8296291314453416e-01, 8.3651630373780794e-01,
    2.2414386804201339e-01, -1.2940952255126037e-01};

constexpr double kDb4[8] = {
    2.3037781330889651e-01, 7.1484657055291567e-01,
    6.3088076792985892e-01, -2.7983769416859854e-02,
    -1.8703481171909309e-01, 3.0841381835560764e-02,
    3.2883011666885197e-02, -1.0597401785069032e-02};

constexpr double kDb6[12] = {
    1.1154074335010947e-01,  4.9462389039845306e-01,
    7.5113390802109536e-01,  3.1525035170919763e-01,
    -2.2626469396543983e-01, -1.2976686756726194e-01,
    9.7501605587323043e-02,  2.7522865530305727e-02,
    -3.1582039317486030e-02, 5.5384220116149613e-04,
    4.7772575109455108e-03,  -1.0773010853084796e-03};

int axis_len(const Dims3& d, int axis) {
  return static_cast<int>(axis == 0 ? d.t : axis == 1 ? d.r : d.c);
}

Dims3 with_axis(Dims3 d, int axis, std::size_t len) {
  (axis == 0 ? d.t : axis == 1 ? d.r : d.c) = len;
  return d;
}

// Flat starting offsets of every 1D line along `axis`, in row-major order of
// the two remaining dims, plus the stride between consecutive entries of a
// line.  The remaining dims are unchanged by the per-axis transforms, so the
// line order of an input view matches that of its half/double-length output
// view entry for entry.
struct AxisView {
  std::size_t len = 0;
  std::size_t stride = 0;
  std::vector<std::size_t> line_starts;
};

AxisView axis_view(const Dims3& d, int axis) {
  AxisView view;
  view.len = static_cast<std::size_t>(axis_len(d, axis));
  const std::size_t strides[3] = {d.r * d.c, d.c, 1};
  view.stride = strides[axis];
  for (std::size_t t = 0; t < d.t; ++t) {
    for (std::size_t r = 0; r < d.r; ++r) {
      for (std::size_t c = 0; c < d.c; ++c) {
        const bool on_face = (axis == 0 && t == 0) || (axis == 1 && r == 0) ||
                             (axis == 2 && c == 0);
        if (on_face) view.line_starts.push_back((t * d.r + r) * d.c + c);
      }
    }
  }
  return view;
}

// Periodic convolution-orientation analysis along one axis:
//   out[k] = sum_i taps[i] * x[(2k + 1 - i) mod n]
Tensor3 axis_analysis(const Tensor3& x, int axis,
                      const std::vector<double>& taps) {
  const std::size_t n = static_cast<std::size_t>(axis_len(x.dims(), axis));
  const std::size_t half = n / 2;
  const Dims3 out_dims = with_axis(x.dims(), axis, half);
  const AxisView in_view = axis_view(x.dims(), axis);
  const AxisView out_view = axis_view(out_dims, axis);

  std::vector<double> out(out_dims.count(), 0.0);
  const long long nn = static_cast<long long>(n);
  for (std::size_t line = 0; line < in_view.line_starts.size(); ++line) {
    const std::size_t in_base = in_view.line_starts[line];
    const std::size_t out_base = out_view.line_starts[line];
    for (std::size_t k = 0; k < half; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < taps.size(); ++i) {
        long long idx = (2 * static_cast<long long>(k) + 1 -
                         static_cast<long long>(i)) %
                        nn;
        if (idx < 0) idx += nn;
        acc += taps[i] *
               x[in_base + static_cast<std::size_t>(idx) * in_view.stride];
      }
      out[out_base + k * out_view.stride] = acc;
    }
  }
  return Tensor3(out_dims, std::move(out));
}

// Transpose of axis_analysis, combining the low- and high-pass channels:
//   out[(2k + 1 - i) mod n] += hL[i]*a[k] + hH[i]*d[k]
Tensor3 axis_synthesis(const Tensor3& approx, const Tensor3& detail, int axis,
                       const WaveletBasis& basis) {
  const std::size_t half =
      static_cast<std::size_t>(axis_len(approx.dims(), axis));
  const std::size_t n = 2 * half;
  const Dims3 out_dims = with_axis(approx.dims(), axis, n);
  const AxisView in_view = axis_view(approx.dims(), axis);
  const AxisView out_view = axis_view(out_dims, axis);

  std::vector<double> out(out_dims.count(), 0.0);
  const long long nn = static_cast<long long>(n);
  for (std::size_t line = 0; line < in_view.line_starts.size(); ++line) {
    const std::size_t in_base = in_view.line_starts[line];
    const std::size_t out_base = out_view.line_starts[line];
    for (std::size_t k = 0; k < half; ++k) {
      const double a = approx[in_base + k * in_view.stride];
      const double d = detail[in_base + k * in_view.stride];
      for (std::size_t i = 0; i < basis.lowpass.size(); ++i) {
        long long idx = (2 * static_cast<long long>(k) + 1 -
                         static_cast<long long>(i)) %
                        nn;
        if (idx < 0) idx += nn;
        out[out_base + static_cast<std::size_t>(idx) * out_view.stride] +=
            basis.lowpass[i] * a + basis.highpass[i] * d;
      }
    }
  }
  return Tensor3(out_dims, std::move(out));
}

// Edge-replicates the final slice along every odd axis so all dims are even.
Tensor3 pad_to_even(const Tensor3& x) {
  Dims3 d = x.dims();
  Dims3 padded{d.t + d.t % 2, d.r + d.r % 2, d.c + d.c % 2};
  if (padded == d) return x;
  std::vector<double> out(padded.count());
  for (std::size_t t = 0; t < padded.t; ++t) {
    const std::size_t ts = std::min(t, d.t - 1);
    for (std::size_t r = 0; r < padded.r; ++r) {
      const std::size_t rs = std::min(r, d.r - 1);
      for (std::size_t c = 0; c < padded.c; ++c) {
        const std::size_t cs = std::min(c, d.c - 1);
        out[(t * padded.r + r) * padded.c + c] = x(ts, rs, cs);
      }
    }
  }
  return Tensor3(padded, std::move(out));
}

Tensor3 crop_to(const Tensor3& x, const Dims3& target) {
  if (x.dims() == target) return x;
  std::vector<double> out(target.count());
  for (std::size_t t = 0; t < target.t; ++t) {
    for (std::size_t r = 0; r < target.r; ++r) {
      for (std::size_t c = 0; c < target.c; ++c) {
        out[(t * target.r + r) * target.c + c] = x(t, r, c);
      }
    }
  }
  return Tensor3(target, std::move(out));
}

}  // namespace

const char* band_name(SubBand f) {
  static const char* kNames[8] = {"LLL", "LLH", "LHL", "LHH",
                                  "HLL", "HLH", "HHL", "HHH"};
  return kNames[static_cast<int>(f)];
}

SubBand band_from_name(const std::string& name) {
  for (SubBand f : kAllBands) {
    if (name == band_name(f)) return f;
  }
  raise("UnknownBand", "no sub-band named '" + name + "'");
}

std::array<int, 3> band_xi(SubBand f) {
  const int v = static_cast<int>(f);
  return {(v >> 2) & 1, (v >> 1) & 1, v & 1};
}

void validate(const WaveletBasis& basis) {
  const std::size_t len = basis.lowpass.size();
  if (len < 2 || len % 2 != 0) {
    raise("BadBasis", basis.name + ": filter length must be even and >= 2");
  }
  if (basis.highpass.size() != len) {
    raise("BadBasis", basis.name + ": lowpass/highpass length mismatch");
  }
  constexpr double kTol = 1e-12;
  double unit = 0.0;
  for (double h : basis.lowpass) unit += h * h;
  if (std::abs(unit - 1.0) > kTol) {
    raise("BadBasis", basis.name + ": sum of squared taps != 1");
  }
  for (std::size_t m = 1; 2 * m < len; ++m) {
    double dot = 0.0;
    for (std::size_t i = 0; i + 2 * m < len; ++i) {
      dot += basis.lowpass[i] * basis.lowpass[i + 2 * m];
    }
    if (std::abs(dot) > kTol) {
      raise("BadBasis",
            basis.name + ": even-shift orthogonality fails at shift " +
                std::to_string(2 * m));
    }
  }
  for (std::size_t i = 0; i < len; ++i) {
    const double expected =
        (i % 2 == 0 ? 1.0 : -1.0) * basis.lowpass[len - 1 - i];
    if (std::abs(basis.highpass[i] - expected) > kTol) {
      raise("BadBasis", basis.name + ": highpass is not the alternating flip");
    }
  }
}

WaveletBasis WaveletBasis::from_lowpass(std::string name,
                                        std::vector<double> taps) {
  WaveletBasis basis;
  basis.name = std::move(name);
  basis.lowpass = std::move(taps);
  const std::size_t len = basis.lowpass.size();
  basis.highpass.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    basis.highpass[i] =
        (i % 2 == 0 ? 1.0 : -1.0) * basis.lowpass[len - 1 - i];
  }
  validate(basis);
  return basis;
}

WaveletBasis WaveletBasis::haar() {
  return from_lowpass("haar", {kInvSqrt2, kInvSqrt2});
}

WaveletBasis WaveletBasis::db2() {
  return from_lowpass("db2", std::vector<double>(kDb2, kDb2 + 4));
}

WaveletBasis WaveletBasis::db4() {
  return from_lowpass("db4", std::vector<double>(kDb4, kDb4 + 8));
}

WaveletBasis WaveletBasis::db6() {
  return from_lowpass("db6", std::vector<double>(kDb6, kDb6 + 12));
}

WaveletBasis WaveletBasis::by_name(const std::string& name) {
  if (name == "haar" || name == "db1") return haar();
  if (name == "db2") return db2();
  if (name == "db4") return db4();
  if (name == "db6") return db6();
  raise("UnknownBasis", "no bundled basis named '" + name + "'");
}

std::pair<std::vector<double>, std::vector<double>> dwt1_haar(
    const std::vector<double>& signal) {
  if (signal.empty() || signal.size() % 2 != 0) {
    raise("OddLength", "dwt1_haar needs a nonempty even-length signal");
  }
  const std::size_t half = signal.size() / 2;
  std::vector<double> approx(half), detail(half);
  for (std::size_t k = 0; k < half; ++k) {
    approx[k] = (signal[2 * k] + signal[2 * k + 1]) * kInvSqrt2;
    detail[k] = (signal[2 * k] - signal[2 * k + 1]) * kInvSqrt2;
  }
  return {std::move(approx), std::move(detail)};
}

std::vector<double> idwt1_haar(const std::vector<double>& approx,
                               const std::vector<double>& detail) {
  if (approx.size() != detail.size()) {
    raise("LengthMismatch", "idwt1_haar: approx and detail lengths differ");
  }
  std::vector<double> signal(2 * approx.size());
  for (std::size_t k = 0; k < approx.size(); ++k) {
    signal[2 * k] = (approx[k] + detail[k]) * kInvSqrt2;
    signal[2 * k + 1] = (approx[k] - detail[k]) * kInvSqrt2;
  }
  return signal;
}

WaveletCoeffs dwt3(const Tensor3& x, const WaveletBasis& basis, bool pad_odd) {
  validate(basis);
  const Dims3 d = x.dims();
  if (d.count() == 0) raise("OddDim", "dwt3: empty tensor");
  if (!pad_odd && (d.t % 2 != 0 || d.r % 2 != 0 || d.c % 2 != 0)) {
    raise("OddDim", "dwt3: dims (" + std::to_string(d.t) + "," +
                        std::to_string(d.r) + "," + std::to_string(d.c) +
                        ") must all be even (or enable padding)");
  }
  const Tensor3 padded = pad_odd ? pad_to_even(x) : x;

  // Axis t, then r, then c; the low/high split along each axis doubles the
  // number of intermediate tensors, giving the 8 sub-bands in xi order.
  const Tensor3 low_t = axis_analysis(padded, 0, basis.lowpass);
  const Tensor3 high_t = axis_analysis(padded, 0, basis.highpass);

  std::array<Tensor3, 4> stage2;  // index bits (xi_t, xi_r)
  stage2[0] = axis_analysis(low_t, 1, basis.lowpass);
  stage2[1] = axis_analysis(low_t, 1, basis.highpass);
  stage2[2] = axis_analysis(high_t, 1, basis.lowpass);
  stage2[3] = axis_analysis(high_t, 1, basis.highpass);

  WaveletCoeffs coeffs;
  coeffs.source_dims = d;
  for (int tr = 0; tr < 4; ++tr) {
    coeffs.bands[2 * tr] = axis_analysis(stage2[tr], 2, basis.lowpass);
    coeffs.bands[2 * tr + 1] = axis_analysis(stage2[tr], 2, basis.highpass);
  }
  return coeffs;
}

Tensor3 idwt3(const WaveletCoeffs& coeffs, const WaveletBasis& basis) {
  validate(basis);
  const Dims3 bd = coeffs.bands[0].dims();
  if (bd.count() == 0) raise("IncompleteBands", "idwt3: empty sub-bands");
  for (const Tensor3& band : coeffs.bands) {
    if (!(band.dims() == bd)) {
      raise("IncompleteBands", "idwt3: sub-band dims disagree");
    }
  }
  const Dims3 full{2 * bd.t, 2 * bd.r, 2 * bd.c};
  const Dims3& src = coeffs.source_dims;
  const bool src_ok = (src.t == full.t || src.t + 1 == full.t) &&
                      (src.r == full.r || src.r + 1 == full.r) &&
                      (src.c == full.c || src.c + 1 == full.c);
  if (!src_ok) {
    raise("IncompleteBands", "idwt3: source_dims inconsistent with bands");
  }

  std::array<Tensor3, 4> stage2;  // index bits (xi_t, xi_r)
  for (int tr = 0; tr < 4; ++tr) {
    stage2[tr] = axis_synthesis(coeffs.bands[2 * tr], coeffs.bands[2 * tr + 1],
                                2, basis);
  }
  const Tensor3 low_t = axis_synthesis(stage2[0], stage2[1], 1, basis);
  const Tensor3 high_t = axis_synthesis(stage2[2], stage2[3], 1, basis);
  const Tensor3 fullres = axis_synthesis(low_t, high_t, 0, basis);
  return crop_to(fullres, src);
}

void write_coeffs_file(const std::filesystem::path& path,
                       const WaveletCoeffs& coeffs) {
  // Each ST3D block has a fixed size given its dims, so offsets can be laid
  // out before anything is written.
  nlohmann::json index;
  std::uint64_t offset = 0;
  for (SubBand f : kAllBands) {
    index["bands"][band_name(f)] = offset;
    offset += 16 + 8 * static_cast<std::uint64_t>(coeffs.band(f).size());
  }
  index["source_dims"] = {coeffs.source_dims.t, coeffs.source_dims.r,
                          coeffs.source_dims.c};
  const std::string header = index.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) raise("IoError", "cannot open " + path.string() + " for writing");
  io::put_u32le(out, static_cast<std::uint32_t>(header.size()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (SubBand f : kAllBands) io::write_st3d(out, coeffs.band(f));
  if (!out) raise("IoError", "write failed for " + path.string());
}

WaveletCoeffs read_coeffs_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise("IoError", "cannot open " + path.string());
  const std::uint32_t header_len = io::get_u32le(in);
  std::string header(header_len, '\0');
  in.read(header.data(), header_len);
  if (!in) raise("CorruptFile", "truncated coefficients header");

  std::array<std::uint64_t, 8> offsets{};
  Dims3 source_dims;
  try {
    const nlohmann::json index = nlohmann::json::parse(header);
    const auto& bands = index.at("bands");
    for (SubBand f : kAllBands) {
      if (!bands.contains(band_name(f))) {
        raise("IncompleteBands", std::string("missing band ") + band_name(f) +
                                     " in " + path.string());
      }
      offsets[static_cast<int>(f)] = bands.at(band_name(f)).get<std::uint64_t>();
    }
    const auto& sd = index.at("source_dims");
    source_dims = Dims3{sd.at(0).get<std::size_t>(),
                        sd.at(1).get<std::size_t>(),
                        sd.at(2).get<std::size_t>()};
  } catch (const nlohmann::json::exception& e) {
    raise("CorruptFile", std::string("bad coefficients header: ") + e.what());
  }

  const std::streampos blocks_start = in.tellg();
  WaveletCoeffs coeffs;
  coeffs.source_dims = source_dims;
  for (SubBand f : kAllBands) {
    in.seekg(blocks_start +
             static_cast<std::streamoff>(offsets[static_cast<int>(f)]));
    coeffs.band(f) = io::read_st3d(in);
  }
  return coeffs;
}

double coeff_distance(const WaveletCoeffs& a, const WaveletCoeffs& b,
                      const std::array<double, 8>& omega) {
  double total = 0.0;
  for (int f = 0; f < 8; ++f) {
    if (!(a.bands[f].dims() == b.bands[f].dims())) {
      raise("DimMismatch", "coeff_distance: band dims differ");
    }
    if (omega[f] == 0.0) continue;
    double sq = 0.0;
    for (std::size_t i = 0; i < a.bands[f].size(); ++i) {
      const double diff = a.bands[f][i] - b.bands[f][i];
      sq += diff * diff;
    }
    total += omega[f] * std::sqrt(sq);
  }
  return total;
}

}  // namespace fable::wavelet
