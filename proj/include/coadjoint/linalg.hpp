#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace coadjoint {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_inf(const Vec& a) {
    double s = 0.0;
    for (double x : a) s = std::max(s, std::abs(x));
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline bool all_finite(const Vec& a) {
    for (double x : a)
        if (!std::isfinite(x)) return false;
    return true;
}

inline Vec scaled(const Vec& a, double s) {
    Vec r(a);
    for (double& x : r) x *= s;
    return r;
}

inline Vec added(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("added: length mismatch");
    Vec r(a);
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

// y += s*x
inline void axpy(double s, const Vec& x, Vec& y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

// Dense row-major real matrix.
class Mat {
  public:
    Mat() : rows_(0), cols_(0) {}
    Mat(int rows, int cols) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols, 0.0) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Mat: negative shape");
    }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return data_[std::size_t(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[std::size_t(i) * cols_ + j]; }

    Mat& operator+=(const Mat& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Mat& operator*=(double s) {
        for (double& x : data_) x *= s;
        return *this;
    }

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(Mat a, double s) { return a *= s; }
    friend Mat operator*(double s, Mat a) { return a *= s; }

    friend Mat operator*(const Mat& a, const Mat& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("Mat*Mat: shape mismatch");
        Mat r(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }

    friend Vec operator*(const Mat& a, const Vec& x) {
        if (std::size_t(a.cols_) != x.size()) throw std::invalid_argument("Mat*Vec: shape mismatch");
        Vec r(a.rows_, 0.0);
        for (int i = 0; i < a.rows_; ++i) {
            double s = 0.0;
            for (int j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
            r[i] = s;
        }
        return r;
    }

    Mat transposed() const {
        Mat r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    double one_norm() const {  // max column sum
        double best = 0.0;
        for (int j = 0; j < cols_; ++j) {
            double s = 0.0;
            for (int i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
            best = std::max(best, s);
        }
        return best;
    }

    double max_abs() const {
        double s = 0.0;
        for (double x : data_) s = std::max(s, std::abs(x));
        return s;
    }

    bool is_finite() const {
        for (double x : data_)
            if (!std::isfinite(x)) return false;
        return true;
    }

  private:
    void check_same_shape(const Mat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Mat: shape mismatch");
    }

    int rows_, cols_;
    std::vector<double> data_;
};

// Scaling-and-squaring with a truncated Taylor core; the core only runs once
// the scaled argument satisfies |B|_1 <= 0.5, where the series converges fast.
inline Mat matrix_exp(const Mat& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("matrix_exp: matrix not square");
    if (!a.is_finite()) throw std::invalid_argument("matrix_exp: non-finite entries");
    const int n = a.rows();
    const double nrm = a.one_norm();
    int squarings = 0;
    if (nrm > 0.5) {
        squarings = int(std::ceil(std::log2(nrm / 0.5)));
    }
    Mat b = a * std::ldexp(1.0, -squarings);
    Mat result = Mat::identity(n);
    Mat term = Mat::identity(n);
    for (int k = 1; k <= 24; ++k) {
        term = term * b;
        term *= 1.0 / k;
        result += term;
        if (term.max_abs() < 1e-18) break;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

// LU with partial pivoting, factored once and reused across solves.
class LuFactor {
  public:
    explicit LuFactor(const Mat& a) : n_(a.rows()), lu_(a), perm_(std::size_t(a.rows())) {
        if (a.rows() != a.cols()) throw std::invalid_argument("LuFactor: matrix not square");
        for (int i = 0; i < n_; ++i) perm_[i] = i;
        for (int col = 0; col < n_; ++col) {
            int piv = col;
            double best = std::abs(lu_(col, col));
            for (int r = col + 1; r < n_; ++r) {
                const double v = std::abs(lu_(r, col));
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (!(best > 0.0) || !std::isfinite(best)) {
                singular_ = true;
                return;
            }
            if (piv != col) {
                std::swap(perm_[piv], perm_[col]);
                for (int j = 0; j < n_; ++j) std::swap(lu_(piv, j), lu_(col, j));
            }
            for (int r = col + 1; r < n_; ++r) {
                const double f = lu_(r, col) / lu_(col, col);
                lu_(r, col) = f;
                for (int j = col + 1; j < n_; ++j) lu_(r, j) -= f * lu_(col, j);
            }
        }
    }

    bool singular() const { return singular_; }

    // Crude reciprocal-condition proxy: min/max pivot magnitude (0 when singular).
    double pivot_ratio() const {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double p = std::abs(lu_(i, i));
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        if (singular_ || hi == 0.0 || !std::isfinite(hi)) return 0.0;
        return lo / hi;
    }

    Vec solve(const Vec& b) const {
        if (singular_) throw std::runtime_error("LuFactor: singular matrix");
        if (b.size() != std::size_t(n_)) throw std::invalid_argument("LuFactor::solve: length mismatch");
        Vec y(n_);
        for (int i = 0; i < n_; ++i) {
            double s = b[perm_[i]];
            for (int j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
            y[i] = s;
        }
        for (int i = n_ - 1; i >= 0; --i) {
            double s = y[i];
            for (int j = i + 1; j < n_; ++j) s -= lu_(i, j) * y[j];
            y[i] = s / lu_(i, i);
        }
        return y;
    }

  private:
    int n_;
    Mat lu_;
    std::vector<int> perm_;
    bool singular_ = false;
};

using Cplx = std::complex<double>;

// Small dense complex matrix; just enough for group representations and
// trace polynomials.
class CMat {
  public:
    CMat() : n_(0) {}
    explicit CMat(int n) : n_(n), data_(std::size_t(n) * n, Cplx(0.0, 0.0)) {
        if (n < 0) throw std::invalid_argument("CMat: negative size");
    }

    static CMat identity(int n) {
        CMat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int size() const { return n_; }

    Cplx& operator()(int i, int j) { return data_[std::size_t(i) * n_ + j]; }
    Cplx operator()(int i, int j) const { return data_[std::size_t(i) * n_ + j]; }

    CMat& operator+=(const CMat& o) {
        check_same_size(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    CMat& operator-=(const CMat& o) {
        check_same_size(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    CMat& operator*=(Cplx s) {
        for (Cplx& x : data_) x *= s;
        return *this;
    }

    friend CMat operator+(CMat a, const CMat& b) { return a += b; }
    friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
    friend CMat operator*(CMat a, Cplx s) { return a *= s; }
    friend CMat operator*(Cplx s, CMat a) { return a *= s; }

    friend CMat operator*(const CMat& a, const CMat& b) {
        a.check_same_size(b);
        CMat r(a.n_);
        for (int i = 0; i < a.n_; ++i)
            for (int k = 0; k < a.n_; ++k) {
                const Cplx aik = a(i, k);
                if (aik == Cplx(0.0, 0.0)) continue;
                for (int j = 0; j < a.n_; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }

    CMat adjoint() const {
        CMat r(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    Cplx trace() const {
        Cplx s(0.0, 0.0);
        for (int i = 0; i < n_; ++i) s += (*this)(i, i);
        return s;
    }

    double one_norm() const {
        double best = 0.0;
        for (int j = 0; j < n_; ++j) {
            double s = 0.0;
            for (int i = 0; i < n_; ++i) s += std::abs((*this)(i, j));
            best = std::max(best, s);
        }
        return best;
    }

    double max_abs() const {
        double s = 0.0;
        for (const Cplx& x : data_) s = std::max(s, std::abs(x));
        return s;
    }

  private:
    void check_same_size(const CMat& o) const {
        if (n_ != o.n_) throw std::invalid_argument("CMat: size mismatch");
    }

    int n_;
    std::vector<Cplx> data_;
};

inline CMat commutator(const CMat& a, const CMat& b) { return a * b - b * a; }

// Real part of the Frobenius pairing <a,b> = Re tr(a^dagger b).
inline double frobenius_re(const CMat& a, const CMat& b) {
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j) s += std::real(std::conj(a(i, j)) * b(i, j));
    return s;
}

inline CMat matrix_exp(const CMat& a) {
    const int n = a.size();
    const double nrm = a.one_norm();
    if (!std::isfinite(nrm)) throw std::invalid_argument("matrix_exp: non-finite entries");
    int squarings = 0;
    if (nrm > 0.5) squarings = int(std::ceil(std::log2(nrm / 0.5)));
    CMat b = a * Cplx(std::ldexp(1.0, -squarings), 0.0);
    CMat result = CMat::identity(n);
    CMat term = CMat::identity(n);
    for (int k = 1; k <= 24; ++k) {
        term = term * b;
        term *= Cplx(1.0 / k, 0.0);
        result += term;
        if (term.max_abs() < 1e-18) break;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

}  // namespace coadjoint
