#include "pepsmqc/json_io.hpp"

#include <cmath>

#include "pepsmqc/errors.hpp"

namespace pepsmqc::json_io {

nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

cplx complex_from(const nlohmann::json& j) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw InputError("expected a complex number as [re, im], got " + j.dump());
}

nlohmann::json vector_json(const CVector& v) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(complex_json(v(i)));
    }
    return out;
}

CVector vector_from(const nlohmann::json& j) {
    if (!j.is_array()) {
        throw InputError("expected an array of complex numbers");
    }
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = complex_from(j[i]);
    }
    return v;
}

nlohmann::json matrix_json(const CMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            row.push_back(complex_json(m(i, k)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix matrix_from(const nlohmann::json& j, Eigen::Index rows) {
    if (!j.is_array() || j.empty()) {
        throw InputError("expected a non-empty matrix");
    }
    // A flat list of entries has rows * cols elements; nested input has one element per row.
    const bool nested = rows > 0 ? static_cast<Eigen::Index>(j.size()) == rows
                                 : j[0].is_array() && (j[0].empty() || j[0][0].is_array() || j[0].size() != 2);
    if (nested) {
        const auto r = static_cast<Eigen::Index>(j.size());
        const auto c = static_cast<Eigen::Index>(j[0].size());
        CMatrix m(r, c);
        for (Eigen::Index i = 0; i < r; ++i) {
            if (!j[static_cast<std::size_t>(i)].is_array() || static_cast<Eigen::Index>(j[static_cast<std::size_t>(i)].size()) != c) {
                throw InputError("matrix rows must have equal length");
            }
            for (Eigen::Index k = 0; k < c; ++k) {
                m(i, k) = complex_from(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
            }
        }
        return m;
    }
    const auto n = static_cast<Eigen::Index>(j.size());
    const Eigen::Index r = rows > 0 ? rows : static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
    if (r <= 0 || n % r != 0) {
        throw InputError("flat matrix length does not match the row count");
    }
    const Eigen::Index c = n / r;
    CMatrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index k = 0; k < c; ++k) {
            m(i, k) = complex_from(j[static_cast<std::size_t>(i * c + k)]);
        }
    }
    return m;
}

}  // namespace pepsmqc::json_io
