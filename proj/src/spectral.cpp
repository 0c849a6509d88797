#include "manton/spectral.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <tuple>

namespace manton {

namespace {
std::vector<double> wavenumbers(int n, double L) {
    std::vector<double> k(n);
    for (int i = 0; i < n; ++i) {
        const int m = i <= n / 2 ? i : i - n;
        k[i] = (2 * i == n) ? 0.0 : 2.0 * M_PI * m / L;
    }
    return k;
}
}  // namespace

Spectral::Spectral(int n1, int n2, double L1, double L2)
    : n1_(n1), n2_(n2), L1_(L1), L2_(L2), k1_(wavenumbers(n1, L1)), k2_(wavenumbers(n2, L2)) {
    if (n1 < 2 || n2 < 2 || !(L1 > 0) || !(L2 > 0)) throw std::invalid_argument("bad spectral grid");
    const std::size_t n = size();
    buf_in_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * n));
    buf_out_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * n));
    auto* in = reinterpret_cast<fftw_complex*>(buf_in_);
    auto* out = reinterpret_cast<fftw_complex*>(buf_out_);
    plan_fwd_ = fftw_plan_dft_2d(n1, n2, in, out, FFTW_FORWARD, FFTW_MEASURE);
    plan_bwd_ = fftw_plan_dft_2d(n1, n2, in, out, FFTW_BACKWARD, FFTW_MEASURE);
    w0_.resize(n);
    w1_.resize(n);
    w2_.resize(n);
    w3_.resize(n);
}

Spectral::~Spectral() {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(buf_in_);
    fftw_free(buf_out_);
}

void Spectral::forward(const cplx* in, cplx* out) const {
    const std::size_t n = size();
    std::copy(in, in + n, buf_in_);
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    std::copy(buf_out_, buf_out_ + n, out);
}

void Spectral::inverse(const cplx* in, cplx* out) const {
    const std::size_t n = size();
    std::copy(in, in + n, buf_in_);
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    const double s = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = buf_out_[i] * s;
}

CField Spectral::forward(const CField& f) const {
    CField out(size());
    forward(f.data(), out.data());
    return out;
}

CField Spectral::inverse(const CField& f) const {
    CField out(size());
    inverse(f.data(), out.data());
    return out;
}

CField Spectral::forward_real(const RField& f) const {
    CField c(f.begin(), f.end());
    forward(c.data(), c.data());
    return c;
}

RField Spectral::inverse_real(const CField& f) const {
    CField c = inverse(f);
    RField r(size());
    for (std::size_t i = 0; i < size(); ++i) r[i] = c[i].real();
    return r;
}

CField Spectral::diff(const CField& f, int axis) const {
    CField h = forward(f);
    for (int i = 0; i < n1_; ++i)
        for (int j = 0; j < n2_; ++j) h[i * n2_ + j] *= cplx(0.0, axis == 0 ? k1_[i] : k2_[j]);
    return inverse(h);
}

RField Spectral::diff(const RField& f, int axis) const {
    CField h = forward_real(f);
    for (int i = 0; i < n1_; ++i)
        for (int j = 0; j < n2_; ++j) h[i * n2_ + j] *= cplx(0.0, axis == 0 ? k1_[i] : k2_[j]);
    return inverse_real(h);
}

RField Spectral::inverse_laplacian(const RField& f) const {
    CField h = forward_real(f);
    for (int i = 0; i < n1_; ++i)
        for (int j = 0; j < n2_; ++j) {
            const double kk = k1_[i] * k1_[i] + k2_[j] * k2_[j];
            h[i * n2_ + j] = kk > 0 ? -h[i * n2_ + j] / kk : 0.0;
        }
    return inverse_real(h);
}

namespace {
std::vector<double> full_wavenumbers(int n, double L) {
    std::vector<double> k(n);
    for (int i = 0; i < n; ++i) k[i] = 2.0 * M_PI * (i <= n / 2 ? i : i - n) / L;
    return k;
}
}  // namespace

CField Spectral::shift(const CField& f, double d1, double d2) const {
    CField h = forward(f);
    const auto q1 = full_wavenumbers(n1_, L1_), q2 = full_wavenumbers(n2_, L2_);
    for (int i = 0; i < n1_; ++i)
        for (int j = 0; j < n2_; ++j) {
            // The Nyquist mode is shifted as a cosine to keep real data real.
            const double a = 2 * i == n1_ ? 0.0 : q1[i] * d1;
            const double b = 2 * j == n2_ ? 0.0 : q2[j] * d2;
            double c = 1.0;
            if (2 * i == n1_) c *= std::cos(q1[i] * d1);
            if (2 * j == n2_) c *= std::cos(q2[j] * d2);
            h[i * n2_ + j] *= c * std::polar(1.0, -(a + b));
        }
    return inverse(h);
}

RField Spectral::shift(const RField& f, double d1, double d2) const {
    CField c(f.begin(), f.end());
    c = shift(c, d1, d2);
    RField r(size());
    for (std::size_t i = 0; i < size(); ++i) r[i] = c[i].real();
    return r;
}

void Spectral::magnetic_kinetic(const RField& a1, const RField& a2, const CField& psi, CField& out) const {
    const std::size_t n = size();
    // w0 = F psi; w1, w2 = D_j psi
    forward(psi.data(), w0_.data());
    for (int i = 0; i < n1_; ++i)
        for (int j = 0; j < n2_; ++j) {
            const std::size_t m = i * n2_ + j;
            w1_[m] = w0_[m] * cplx(0.0, k1_[i]);
            w2_[m] = w0_[m] * cplx(0.0, k2_[j]);
        }
    inverse(w1_.data(), w1_.data());
    inverse(w2_.data(), w2_.data());
    const cplx I(0.0, 1.0);
    for (std::size_t m = 0; m < n; ++m) {
        w1_[m] -= I * a1[m] * psi[m];
        w2_[m] -= I * a2[m] * psi[m];
    }
    // w3 = sum_j d_j D_j psi (spectral), then subtract i a_j D_j psi.
    forward(w1_.data(), w0_.data());
    forward(w2_.data(), w3_.data());
    for (int i = 0; i < n1_; ++i)
        for (int j = 0; j < n2_; ++j) {
            const std::size_t m = i * n2_ + j;
            w3_[m] = w0_[m] * cplx(0.0, k1_[i]) + w3_[m] * cplx(0.0, k2_[j]);
        }
    inverse(w3_.data(), w3_.data());
    out.resize(n);
    for (std::size_t m = 0; m < n; ++m) out[m] = -0.5 * (w3_[m] - I * (a1[m] * w1_[m] + a2[m] * w2_[m]));
}

const Spectral& spectral_for(int n1, int n2, double L1, double L2) {
    static std::map<std::tuple<int, int, double, double>, std::unique_ptr<Spectral>> cache;
    auto& slot = cache[{n1, n2, L1, L2}];
    if (!slot) slot = std::make_unique<Spectral>(n1, n2, L1, L2);
    return *slot;
}

namespace {
double norm2(const CField& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

cplx dot(const CField& a, const CField& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

// One Krylov step of size tau. Returns false if not converged in max_krylov.
bool lanczos_once(const std::function<void(const CField&, CField&)>& H, const CField& v, double tau, double tol,
                  int max_krylov, CField& out, ExpmvInfo& info) {
    const double beta0 = norm2(v);
    out.assign(v.size(), 0.0);
    if (beta0 == 0.0) return true;
    std::vector<CField> V;
    V.reserve(max_krylov + 1);
    V.emplace_back(v);
    for (auto& z : V[0]) z /= beta0;
    std::vector<double> alpha, beta;
    CField w;
    Eigen::VectorXcd y;
    for (int m = 0; m < max_krylov; ++m) {
        H(V[m], w);
        ++info.iterations;
        for (int pass = 0; pass < 2; ++pass)
            for (int k = 0; k <= m; ++k) {
                const cplx h = dot(V[k], w);
                if (pass == 0 && k == m) alpha.push_back(h.real());
                for (std::size_t i = 0; i < w.size(); ++i) w[i] -= h * V[k][i];
            }
        const double b = norm2(w);
        const int dim = m + 1;
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < dim) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const Eigen::VectorXd& lam = es.eigenvalues();
        const Eigen::MatrixXd& Q = es.eigenvectors();
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
        for (int i = 0; i < dim; ++i) e(i) = std::polar(1.0, -tau * lam(i)) * Q(0, i);
        y = Q.cast<cplx>() * e;
        const double err = b * std::abs(y(dim - 1));
        info.error_estimate = err;
        if (err < tol || b < 1e-300) {
            for (int k = 0; k < dim; ++k)
                for (std::size_t i = 0; i < out.size(); ++i) out[i] += beta0 * y(k) * V[k][i];
            return true;
        }
        beta.push_back(b);
        for (auto& z : w) z /= b;
        V.push_back(w);
    }
    return false;
}
}  // namespace

CField expmv_lanczos(const std::function<void(const CField&, CField&)>& H, const CField& v, double tau, double tol,
                     int max_krylov, ExpmvInfo* info) {
    ExpmvInfo local;
    int pieces = 1;
    for (int attempt = 0; attempt < 12; ++attempt, pieces *= 2) {
        CField cur = v, next;
        bool ok = true;
        for (int p = 0; p < pieces && ok; ++p) {
            ok = lanczos_once(H, cur, tau / pieces, tol, max_krylov, next, local);
            cur.swap(next);
        }
        if (ok) {
            local.substeps = pieces;
            if (info) *info = local;
            return cur;
        }
    }
    throw std::runtime_error("Lanczos exponential did not converge");
}

}  // namespace manton
