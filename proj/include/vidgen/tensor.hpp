#ifndef VIDGEN_TENSOR_HPP
#define VIDGEN_TENSOR_HPP

#include <Eigen/Core>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "vidgen/rng.hpp"

namespace vidgen {

// Dense row-major n-d array. Heavy lifting (matmuls) goes through Eigen maps.
template <class Scalar>
struct Tensor {
    std::vector<int64_t> shape;
    std::vector<Scalar> data;

    using MatMap = Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
    using ConstMatMap =
        Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

    Tensor() = default;
    explicit Tensor(std::vector<int64_t> s) : shape(std::move(s)) { data.assign(numel_of(shape), Scalar(0)); }
    Tensor(std::vector<int64_t> s, std::vector<Scalar> d) : shape(std::move(s)), data(std::move(d)) {
        if (int64_t(data.size()) != numel_of(shape)) throw std::invalid_argument("tensor: data/shape mismatch");
    }

    static int64_t numel_of(const std::vector<int64_t>& s) {
        int64_t n = 1;
        for (int64_t d : s) n *= d;
        return n;
    }

    int64_t numel() const { return int64_t(data.size()); }
    int ndim() const { return int(shape.size()); }
    int64_t dim(int i) const { return shape[size_t(i)]; }

    Scalar& operator[](int64_t i) { return data[size_t(i)]; }
    const Scalar& operator[](int64_t i) const { return data[size_t(i)]; }

    static Tensor zeros(std::vector<int64_t> s) { return Tensor(std::move(s)); }

    static Tensor full(std::vector<int64_t> s, Scalar v) {
        Tensor t(std::move(s));
        std::fill(t.data.begin(), t.data.end(), v);
        return t;
    }

    static Tensor randn(std::vector<int64_t> s, Rng& rng, Scalar stddev = Scalar(1)) {
        Tensor t(std::move(s));
        for (auto& x : t.data) x = Scalar(rng.gaussian()) * stddev;
        return t;
    }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    // view as rows x cols matrix (rows*cols must equal numel)
    MatMap mat(int64_t rows, int64_t cols) {
        if (rows * cols != numel()) throw std::invalid_argument("tensor: bad mat view");
        return MatMap(data.data(), rows, cols);
    }
    ConstMatMap mat(int64_t rows, int64_t cols) const {
        if (rows * cols != numel()) throw std::invalid_argument("tensor: bad mat view");
        return ConstMatMap(data.data(), rows, cols);
    }

    Tensor reshaped(std::vector<int64_t> s) const {
        if (numel_of(s) != numel()) throw std::invalid_argument("tensor: reshape numel mismatch");
        return Tensor(std::move(s), data);
    }

    template <class S2>
    Tensor<S2> cast() const {
        Tensor<S2> out;
        out.shape = shape;
        out.data.resize(data.size());
        for (size_t i = 0; i < data.size(); ++i) out.data[i] = S2(data[i]);
        return out;
    }

    Scalar max_abs() const {
        Scalar m(0);
        for (Scalar v : data) m = std::max(m, std::abs(v));
        return m;
    }

    std::string shape_str() const {
        std::string s = "[";
        for (size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
        return s + "]";
    }
};

using Tensorf = Tensor<float>;
using Tensord = Tensor<double>;

template <class S>
inline void check_same_shape(const Tensor<S>& a, const Tensor<S>& b, const char* who) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(who) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

}  // namespace vidgen

#endif  // VIDGEN_TENSOR_HPP
