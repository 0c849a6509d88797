// FFTW-backed spectral operators on a doubly periodic n1 x n2 grid.
#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace manton {

using cplx = std::complex<double>;
using CField = std::vector<cplx>;
using RField = std::vector<double>;

class Spectral {
public:
    Spectral(int n1, int n2, double L1, double L2);
    ~Spectral();
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    int n1() const { return n1_; }
    int n2() const { return n2_; }
    std::size_t size() const { return static_cast<std::size_t>(n1_) * n2_; }
    double L1() const { return L1_; }
    double L2() const { return L2_; }
    /// First-derivative wavenumbers, Nyquist zeroed.
    const std::vector<double>& k1() const { return k1_; }
    const std::vector<double>& k2() const { return k2_; }

    void forward(const cplx* in, cplx* out) const;
    /// Normalized inverse.
    void inverse(const cplx* in, cplx* out) const;
    CField forward(const CField& f) const;
    CField inverse(const CField& f) const;
    CField forward_real(const RField& f) const;
    RField inverse_real(const CField& f) const;

    /// d/dx_axis (axis 0 or 1).
    CField diff(const CField& f, int axis) const;
    RField diff(const RField& f, int axis) const;
    /// Zero-mean solution of lap u = f (mean of f is ignored).
    RField inverse_laplacian(const RField& f) const;
    /// Shift f(x) -> f(x - d) by phase ramps.
    CField shift(const CField& f, double d1, double d2) const;
    RField shift(const RField& f, double d1, double d2) const;

    /// K psi = -1/2 (grad - i a)^2 psi, Hermitian in the discrete inner product.
    void magnetic_kinetic(const RField& a1, const RField& a2, const CField& psi, CField& out) const;

private:
    int n1_, n2_;
    double L1_, L2_;
    std::vector<double> k1_, k2_;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
    cplx* buf_in_ = nullptr;
    cplx* buf_out_ = nullptr;
    mutable CField w0_, w1_, w2_, w3_;
};

/// Shared instance per grid shape.
const Spectral& spectral_for(int n1, int n2, double L1, double L2);

struct ExpmvInfo {
    int iterations = 0;
    int substeps = 0;
    double error_estimate = 0.0;
};

/// exp(-i tau H) v for Hermitian H by Lanczos with full reorthogonalization.
CField expmv_lanczos(const std::function<void(const CField&, CField&)>& H, const CField& v, double tau,
                     double tol = 1e-14, int max_krylov = 40, ExpmvInfo* info = nullptr);

}  // namespace manton
