// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sixdmhs/channel.hpp"
#include "sixdmhs/geometry.hpp"
#include "sixdmhs/rhs.hpp"
#include "sixdmhs/rng.hpp"

namespace sixdmhs {

// Border ring of sensing elements around the RHS, centered on the surface
// center in the local frame.
struct SensingLayout {
    int n_x = 32;
    int n_y = 32;
    double d_s = 0.005;  // sensing element spacing [m]

    int count() const { return 2 * n_x + 2 * n_y - 4; }
    bool on_border(int ix, int iy) const {
        return ix == 0 || iy == 0 || ix == n_x - 1 || iy == n_y - 1;
    }
    Vec3 local_coord(int ix, int iy) const {
        return {(ix - (n_x - 1) / 2.0) * d_s, (iy - (n_y - 1) / 2.0) * d_s, 0.0};
    }
    // canonical border scan order (row-major over the full grid)
    std::vector<std::pair<int, int>> border_indices() const;
};

// Reference wave per sensing element: sqrt(A) exp(j 2 pi chi),
// chi ~ U(-sigma1, sigma1). Phases follow the canonical border order.
struct ReferenceField {
    double amplitude = 0.0;  // sqrt(A)
    rvec phase;              // 2 pi chi per border element

    double a_const() const { return amplitude * amplitude; }
    cplx value(int border_pos) const {
        return amplitude * cplx{std::cos(phase[border_pos]), std::sin(phase[border_pos])};
    }
};

ReferenceField draw_reference(const SensingLayout& layout, double a_const, double sigma1,
                              Rng& rng);

// Full n_x x n_y matrices, row-major; interior entries stay zero.
using BorderComplex = cvec;
using BorderReal = rvec;

// Uplink channel on the border in the local frame:
// h = sum_iota Lambda eta exp(j 2 pi / lambda f(theta_L, phi_L)^T r_S,L).
BorderComplex border_channel(const ChannelRealization& ch, int k, int b,
                             const SurfacePose& pose, const SensingLayout& layout);

// Exact power-meter values |y + s_ref|^2 with y = sqrt(P_S) h + noise.
BorderReal meter_readings(const BorderComplex& uplink, const SensingLayout& layout,
                          const ReferenceField& ref, double p_sense, double noise_var,
                          Rng& rng);

// Holographic image H = (reading - A) s_ref.
BorderComplex excite(const BorderReal& readings, const SensingLayout& layout,
                     const ReferenceField& ref);

// (1/N) sum_border exp(-j 2 pi / lambda f . r) H; the Theorem-1 correlation.
cplx correlate(const BorderComplex& image, const SensingLayout& layout, double wavelength,
               const Vec3& f_local);

enum class BinMapping : uint8_t {
    Standard,  // f1 = lambda k_x / (N_x d_S), centered bins
    Paper,     // literal published formula, for comparison
};

struct AngleEstimate {
    Vec3 f_local;
    Vec3 f_global;
    int surface = -1;
    int bin_x = 0;
    int bin_y = 0;
    double peak = 0.0;
};

struct DetectOptions {
    int zero_pad = 4;
    BinMapping mapping = BinMapping::Standard;
};

// Per-surface 2D-FFT peak of one holographic image.
AngleEstimate fft_detect_single(const BorderComplex& image, const SensingLayout& layout,
                                double wavelength, const DetectOptions& opt);

// Global argmax over (bin_x, bin_y, surface); converts the winning local
// direction with the initial rotation of the winning surface.
AngleEstimate fft_detect(const std::vector<BorderComplex>& images, const SensingLayout& layout,
                         double wavelength, const std::vector<Mat3>& initial_rotations,
                         const DetectOptions& opt);

// Unpadded FFT-bin direction grid (front hemisphere), the default oracle grid.
std::vector<Vec3> fft_bin_grid(const SensingLayout& layout, double wavelength);

// Brute-force correlation argmax over a direction grid; independent oracle for
// fft_detect.
AngleEstimate matched_filter_oracle(const BorderComplex& image, const SensingLayout& layout,
                                    double wavelength, const std::vector<Vec3>& grid);

struct LsBaselineConfig {
    int snapshots = 16;
    double p_sense = 0.01;
    double noise_var = 1e-13;
    uint64_t seed = 1;
};

// Series-aggregation baseline: the uplink is observed only at the Q feed
// ports through random known holographic patterns; a single-path gain is
// LS-fitted per candidate direction and the smallest-residual direction wins.
AngleEstimate ls_baseline_detect(const ChannelRealization& ch, int k,
                                 const std::vector<SurfacePose>& poses,
                                 const SurfaceLayout& layout, const EmResponse& em,
                                 const std::vector<Vec3>& local_grid,
                                 const std::vector<Mat3>& initial_rotations,
                                 const LsBaselineConfig& cfg);

// Mean squared direction-vector error (1/T) sum |f_e - f_t|^2. The paper names
// this RMSE; the outer square root is absent from its displayed definition and
// the formula is implemented literally.
double rmse(const std::vector<Vec3>& estimates, const std::vector<Vec3>& truths);

}  // namespace sixdmhs
