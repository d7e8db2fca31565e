// SPDX-License-Identifier: Apache-2.0
#include "sixdmhs/sensing.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace sixdmhs {

std::vector<std::pair<int, int>> SensingLayout::border_indices() const {
    std::vector<std::pair<int, int>> idx;
    idx.reserve(count());
    for (int ix = 0; ix < n_x; ++ix)
        for (int iy = 0; iy < n_y; ++iy)
            if (on_border(ix, iy)) idx.emplace_back(ix, iy);
    return idx;
}

ReferenceField draw_reference(const SensingLayout& layout, double a_const, double sigma1,
                              Rng& rng) {
    ReferenceField ref;
    ref.amplitude = std::sqrt(a_const);
    ref.phase.resize(layout.count());
    for (double& p : ref.phase) p = 2.0 * kPi * rng.uniform(-sigma1, sigma1);
    return ref;
}

BorderComplex border_channel(const ChannelRealization& ch, int k, int b,
                             const SurfacePose& pose, const SensingLayout& layout) {
    BorderComplex h(static_cast<size_t>(layout.n_x) * layout.n_y, cplx{0.0, 0.0});
    const double beta = 2.0 * kPi / ch.wavelength;
    const auto& path_list = ch.paths[k][b];
    for (size_t iota = 0; iota < path_list.size(); ++iota) {
        if (!ch.mask[k][b][iota]) continue;
        Vec3 f_local = pose.rotation.apply_transpose(
            direction_vector(path_list[iota].theta, path_list[iota].phi));
        cplx g = path_list[iota].gain;
        for (int ix = 0; ix < layout.n_x; ++ix)
            for (int iy = 0; iy < layout.n_y; ++iy) {
                if (!layout.on_border(ix, iy)) continue;
                double ph = beta * f_local.dot(layout.local_coord(ix, iy));
                h[ix * layout.n_y + iy] += g * cplx{std::cos(ph), std::sin(ph)};
            }
    }
    return h;
}

BorderReal meter_readings(const BorderComplex& uplink, const SensingLayout& layout,
                          const ReferenceField& ref, double p_sense, double noise_var,
                          Rng& rng) {
    BorderReal readings(static_cast<size_t>(layout.n_x) * layout.n_y, 0.0);
    const double amp = std::sqrt(p_sense);
    int pos = 0;
    for (int ix = 0; ix < layout.n_x; ++ix)
        for (int iy = 0; iy < layout.n_y; ++iy) {
            if (!layout.on_border(ix, iy)) continue;
            cplx y = amp * uplink[ix * layout.n_y + iy];
            if (noise_var > 0.0) y += rng.cnormal(noise_var);
            readings[ix * layout.n_y + iy] = std::norm(y + ref.value(pos));
            ++pos;
        }
    return readings;
}

BorderComplex excite(const BorderReal& readings, const SensingLayout& layout,
                     const ReferenceField& ref) {
    BorderComplex image(static_cast<size_t>(layout.n_x) * layout.n_y, cplx{0.0, 0.0});
    int pos = 0;
    for (int ix = 0; ix < layout.n_x; ++ix)
        for (int iy = 0; iy < layout.n_y; ++iy) {
            if (!layout.on_border(ix, iy)) continue;
            // subtract the measured reference power so a zero uplink excites to
            // exactly zero
            cplx s = ref.value(pos);
            image[ix * layout.n_y + iy] = (readings[ix * layout.n_y + iy] - std::norm(s)) * s;
            ++pos;
        }
    return image;
}

cplx correlate(const BorderComplex& image, const SensingLayout& layout, double wavelength,
               const Vec3& f_local) {
    const double beta = 2.0 * kPi / wavelength;
    cplx s = 0.0;
    for (int ix = 0; ix < layout.n_x; ++ix)
        for (int iy = 0; iy < layout.n_y; ++iy) {
            if (!layout.on_border(ix, iy)) continue;
            double ph = -beta * f_local.dot(layout.local_coord(ix, iy));
            s += image[ix * layout.n_y + iy] * cplx{std::cos(ph), std::sin(ph)};
        }
    return s / static_cast<double>(layout.count());
}

namespace {

// FFTW plans are cached per size; planning is serialized, execution uses the
// new-array interface on per-call buffers.
struct PlanCache {
    std::mutex mu;
    std::map<std::pair<int, int>, fftw_plan> plans;
    std::vector<cvec*> scratch;

    fftw_plan get(int nx, int ny) {
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_pair(nx, ny);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;
        auto* buf = new cvec(static_cast<size_t>(nx) * ny);
        scratch.push_back(buf);
        fftw_plan p = fftw_plan_dft_2d(
            nx, ny, reinterpret_cast<fftw_complex*>(buf->data()),
            reinterpret_cast<fftw_complex*>(buf->data()), FFTW_FORWARD,
            FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans[key] = p;
        return p;
    }
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

void fft2d(cvec& buf, int nx, int ny) {
    fftw_plan p = plan_cache().get(nx, ny);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(buf.data()),
                     reinterpret_cast<fftw_complex*>(buf.data()));
}

int centered(int k, int n) { return k >= n / 2 ? k - n : k; }

Vec3 lift_to_sphere(double f1, double f2) {
    double r2 = f1 * f1 + f2 * f2;
    if (r2 > 1.0) {
        double r = std::sqrt(r2);
        f1 /= r;
        f2 /= r;
        r2 = 1.0;
    }
    return {f1, f2, std::sqrt(std::max(0.0, 1.0 - r2))};
}

}  // namespace

AngleEstimate fft_detect_single(const BorderComplex& image, const SensingLayout& layout,
                                double wavelength, const DetectOptions& opt) {
    double max_abs = 0.0;
    for (const auto& v : image) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) throw NoDetectionError("fft_detect: all-zero holographic image");

    const int pad = std::max(1, opt.zero_pad);
    const int px = pad * layout.n_x;
    const int py = pad * layout.n_y;
    cvec buf(static_cast<size_t>(px) * py, cplx{0.0, 0.0});
    for (int ix = 0; ix < layout.n_x; ++ix)
        for (int iy = 0; iy < layout.n_y; ++iy)
            buf[static_cast<size_t>(ix) * py + iy] = image[ix * layout.n_y + iy];
    fft2d(buf, px, py);

    AngleEstimate est;
    double best = -1.0;
    for (int kx = 0; kx < px; ++kx)
        for (int ky = 0; ky < py; ++ky) {
            double mag = std::abs(buf[static_cast<size_t>(kx) * py + ky]);
            if (mag > best) {
                best = mag;
                est.bin_x = kx;
                est.bin_y = ky;
            }
        }
    est.peak = best;
    double f1 = 0.0, f2 = 0.0;
    if (opt.mapping == BinMapping::Standard) {
        f1 = wavelength * centered(est.bin_x, px) / (px * layout.d_s);
        f2 = wavelength * centered(est.bin_y, py) / (py * layout.d_s);
    } else {
        // literal published mapping (dimensionally inconsistent; kept for
        // comparison): f1 from the column bin, f2 from the row bin
        const double n = static_cast<double>(layout.count());
        f1 = (2.0 * est.bin_y - py + 1.0) * layout.d_s / (2.0 * n * wavelength);
        f2 = (2.0 * est.bin_x - px + 1.0) * layout.d_s / (2.0 * n * wavelength);
    }
    est.f_local = lift_to_sphere(f1, f2);
    est.f_global = est.f_local;
    return est;
}

AngleEstimate fft_detect(const std::vector<BorderComplex>& images, const SensingLayout& layout,
                         double wavelength, const std::vector<Mat3>& initial_rotations,
                         const DetectOptions& opt) {
    if (images.empty() || images.size() != initial_rotations.size())
        throw std::invalid_argument("fft_detect: one image per surface required");
    AngleEstimate best;
    best.peak = -1.0;
    for (size_t b = 0; b < images.size(); ++b) {
        AngleEstimate est;
        try {
            est = fft_detect_single(images[b], layout, wavelength, opt);
        } catch (const NoDetectionError&) {
            continue;
        }
        if (est.peak > best.peak) {
            best = est;
            best.surface = static_cast<int>(b);
        }
    }
    if (best.surface < 0) throw NoDetectionError("fft_detect: all images are zero");
    best.f_global = initial_rotations[best.surface].apply(best.f_local);
    return best;
}

std::vector<Vec3> fft_bin_grid(const SensingLayout& layout, double wavelength) {
    std::vector<Vec3> grid;
    for (int kx = 0; kx < layout.n_x; ++kx)
        for (int ky = 0; ky < layout.n_y; ++ky) {
            double f1 = wavelength * centered(kx, layout.n_x) / (layout.n_x * layout.d_s);
            double f2 = wavelength * centered(ky, layout.n_y) / (layout.n_y * layout.d_s);
            if (f1 * f1 + f2 * f2 <= 1.0) grid.push_back(lift_to_sphere(f1, f2));
        }
    return grid;
}

AngleEstimate matched_filter_oracle(const BorderComplex& image, const SensingLayout& layout,
                                    double wavelength, const std::vector<Vec3>& grid) {
    if (grid.empty()) throw std::invalid_argument("matched_filter_oracle: empty grid");
    AngleEstimate est;
    double best = -1.0;
    for (const auto& f : grid) {
        double mag = std::abs(correlate(image, layout, wavelength, f));
        if (mag > best) {
            best = mag;
            est.f_local = f;
        }
    }
    est.peak = best;
    est.f_global = est.f_local;
    return est;
}

AngleEstimate ls_baseline_detect(const ChannelRealization& ch, int k,
                                 const std::vector<SurfacePose>& poses,
                                 const SurfaceLayout& layout, const EmResponse& em,
                                 const std::vector<Vec3>& local_grid,
                                 const std::vector<Mat3>& initial_rotations,
                                 const LsBaselineConfig& cfg) {
    if (em.q < 1) throw std::invalid_argument("ls_baseline_detect: at least one feed required");
    if (local_grid.empty()) throw std::invalid_argument("ls_baseline_detect: empty grid");
    const int m = layout.elements();
    const double sqrt_ps = std::sqrt(cfg.p_sense);
    Rng rng(cfg.seed);

    AngleEstimate best;
    best.peak = -1.0;
    double best_score = -1.0;
    for (size_t b = 0; b < poses.size(); ++b) {
        // known random holographic patterns, one per snapshot
        std::vector<rvec> patterns(cfg.snapshots, rvec(m));
        for (auto& psi : patterns)
            for (double& v : psi) v = rng.uniform();
        cvec h = channel_vector(ch, k, static_cast<int>(b), poses[b], layout);
        // observations y_t = sqrt(P_S) Theta^T diag(Psi_t) h + z
        std::vector<cvec> obs(cfg.snapshots, cvec(em.q));
        for (int t = 0; t < cfg.snapshots; ++t)
            for (int q = 0; q < em.q; ++q) {
                cplx s = 0.0;
                for (int i = 0; i < m; ++i) s += em.data[i * em.q + q] * patterns[t][i] * h[i];
                obs[t][q] = sqrt_ps * s + (cfg.noise_var > 0.0 ? rng.cnormal(cfg.noise_var)
                                                               : cplx{0.0, 0.0});
            }
        for (const auto& f_local : local_grid) {
            Vec3 f_global = initial_rotations[b].apply(f_local);
            Angles ang = angles_of(f_global);
            cvec a = steering(poses[b], layout, ang.theta, ang.phi, ch.wavelength);
            // single-path LS fit: residual = |y|^2 - |<c, y>|^2 / |c|^2
            cplx inner = 0.0;
            double c_norm = 0.0;
            for (int t = 0; t < cfg.snapshots; ++t)
                for (int q = 0; q < em.q; ++q) {
                    cplx c = 0.0;
                    for (int i = 0; i < m; ++i)
                        c += em.data[i * em.q + q] * patterns[t][i] * a[i];
                    inner += std::conj(c) * obs[t][q];
                    c_norm += std::norm(c);
                }
            double score = c_norm > 0.0 ? std::norm(inner) / c_norm : 0.0;
            if (score > best_score) {
                best_score = score;
                best.f_local = f_local;
                best.f_global = f_global;
                best.surface = static_cast<int>(b);
                best.peak = score;
            }
        }
    }
    if (best_score <= 0.0) throw NoDetectionError("ls_baseline_detect: no signal");
    return best;
}

double rmse(const std::vector<Vec3>& estimates, const std::vector<Vec3>& truths) {
    if (estimates.empty() || estimates.size() != truths.size())
        throw std::invalid_argument("rmse: paired non-empty lists required");
    double s = 0.0;
    for (size_t i = 0; i < estimates.size(); ++i) {
        Vec3 d = estimates[i] - truths[i];
        s += d.dot(d);
    }
    return s / static_cast<double>(estimates.size());
}

}  // namespace sixdmhs
