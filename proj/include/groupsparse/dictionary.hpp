#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "groupsparse/data.hpp"
#include "groupsparse/differentiate.hpp"
#include "groupsparse/error.hpp"
#include "groupsparse/labels.hpp"
#include "groupsparse/matrix.hpp"

namespace groupsparse {

struct DictionaryBlock {
    std::string name;
    std::size_t row_begin = 0;
    std::size_t row_count = 0;
    std::size_t col_begin = 0;
    std::size_t col_count = 0;
};

/// Candidate-term design matrix with per-column labels. Composite
/// (block-diagonal) dictionaries carry one block per species equation or
/// spatial location; entries outside a column's block rows are exactly zero.
struct Dictionary {
    DenseMatrix matrix;
    std::vector<TermLabel> labels;
    std::vector<DictionaryBlock> blocks;
    std::vector<std::size_t> block_of_col;

    std::size_t rows() const { return matrix.rows; }
    std::size_t cols() const { return matrix.cols; }

    bool is_composite() const { return blocks.size() > 1; }

    std::string column_name(std::size_t j) const {
        if (!is_composite()) return labels[j].str();
        return blocks[block_of_col[j]].name + ":" + labels[j].str();
    }

    std::optional<std::size_t> find_column(std::size_t block, const TermLabel& label) const {
        const auto& b = blocks.at(block);
        for (std::size_t j = b.col_begin; j < b.col_begin + b.col_count; ++j)
            if (labels[j] == label) return j;
        return std::nullopt;
    }

    std::optional<std::size_t> find_block(const std::string& name) const {
        for (std::size_t b = 0; b < blocks.size(); ++b)
            if (blocks[b].name == name) return b;
        return std::nullopt;
    }
};

/// Key for looking up the sampled values a factor needs: the variable plus
/// its derivative multi-index.
struct FieldKey {
    std::string var;
    std::vector<int> deriv;
    friend bool operator<(const FieldKey& a, const FieldKey& b) {
        if (a.var != b.var) return a.var < b.var;
        return a.deriv < b.deriv;
    }
};

using ValueTable = std::map<FieldKey, Vector>;

/// Evaluates labels column-by-column against sampled values and assembles a
/// single-block dictionary. All required (variable, derivative) arrays must
/// be present in the table.
inline Dictionary build_dictionary(std::vector<TermLabel> labels, const ValueTable& table,
                                   std::size_t n_samples, const std::string& block_name = "") {
    Dictionary d;
    d.matrix = DenseMatrix(n_samples, labels.size());
    for (std::size_t j = 0; j < labels.size(); ++j) {
        const TermLabel& l = labels[j];
        for (std::size_t i = 0; i < n_samples; ++i) d.matrix(i, j) = 1.0;
        for (const auto& f : l.factors) {
            auto it = table.find({f.var, f.deriv});
            require(it != table.end(), errc::invalid_argument,
                    "build_dictionary: no values for factor " + TermLabel{{f}, ""}.str());
            require(it->second.size() == n_samples, errc::dimension_mismatch,
                    "build_dictionary: value array length mismatch for " + f.var);
            const Vector& v = it->second;
            for (std::size_t i = 0; i < n_samples; ++i) {
                double p = v[i];
                double acc = p;
                for (int k = 1; k < f.power; ++k) acc *= p;
                d.matrix(i, j) *= acc;
            }
        }
        if (!l.exogenous.empty()) {
            auto it = table.find({l.exogenous, {}});
            require(it != table.end(), errc::invalid_argument,
                    "build_dictionary: no values for exogenous input " + l.exogenous);
            const Vector& v = it->second;
            for (std::size_t i = 0; i < n_samples; ++i) d.matrix(i, j) *= v[i];
        }
    }
    d.labels = std::move(labels);
    d.blocks = {{block_name, 0, n_samples, 0, d.labels.size()}};
    d.block_of_col.assign(d.labels.size(), 0);
    return d;
}

/// All monomials of total degree 1..max_degree in the named state variables,
/// in graded lexicographic column order. An optional exogenous input enters
/// with power one, so its products span total degrees 1..max_degree as well.
inline Dictionary monomial_features(const std::vector<std::pair<std::string, Vector>>& states,
                                    std::size_t max_degree,
                                    const std::pair<std::string, Vector>* exogenous = nullptr) {
    require(!states.empty(), errc::invalid_argument, "monomial_features: no state variables");
    require(max_degree >= 1, errc::invalid_argument, "monomial_features: max_degree >= 1");
    const std::size_t n = states.front().second.size();
    ValueTable table;
    for (const auto& [name, v] : states) {
        require(v.size() == n, errc::dimension_mismatch,
                "monomial_features: state length mismatch for " + name);
        table[{name, {}}] = v;
    }
    if (exogenous) {
        require(exogenous->second.size() == n, errc::dimension_mismatch,
                "monomial_features: exogenous length mismatch");
        table[{exogenous->first, {}}] = exogenous->second;
    }

    // Enumerate exponent vectors of total degree 1..max_degree.
    std::vector<TermLabel> labels;
    const std::size_t nv = states.size();
    std::vector<int> expo(nv, 0);
    auto emit = [&](bool with_exo) {
        TermLabel l;
        for (std::size_t k = 0; k < nv; ++k)
            if (expo[k] > 0) l.factors.push_back({states[k].first, {}, expo[k]});
        if (with_exo) l.exogenous = exogenous->first;
        l.canonicalize();
        if (l.degree() >= 1) labels.push_back(std::move(l));
    };
    auto enumerate = [&](auto&& self, std::size_t k, int remaining, bool with_exo) -> void {
        if (k == nv) {
            emit(with_exo);
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            expo[k] = e;
            self(self, k + 1, remaining - e, with_exo);
        }
        expo[k] = 0;
    };
    enumerate(enumerate, 0, static_cast<int>(max_degree), false);
    if (exogenous) enumerate(enumerate, 0, static_cast<int>(max_degree) - 1, true);

    std::sort(labels.begin(), labels.end(), grlex_less);
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return build_dictionary(std::move(labels), table, n);
}

/// Pure derivative columns (u_x, u_xx, and u_y/u_yy in 2D) of every species
/// of a sampled field, estimated by local polynomial fits on the retained
/// interior points, at one time slice per retained sample.
inline Dictionary derivative_features(const SpatioTemporalField& field, std::size_t max_order,
                                      const DerivativeSpec& spec) {
    spec.validate();
    require(max_order >= 1 && max_order <= 2, errc::invalid_argument,
            "derivative_features: max_order must be 1 or 2");
    require(field.nx >= spec.window, errc::invalid_argument,
            "derivative_features: grid too small for the differentiation stencil");
    if (!field.is_1d())
        require(field.ny >= spec.window, errc::invalid_argument,
                "derivative_features: grid too small for the differentiation stencil");

    const std::size_t ndim = field.is_1d() ? 1 : 2;
    std::vector<TermLabel> labels;
    for (const auto& s : field.species)
        for (std::size_t axis = 0; axis < ndim; ++axis)
            for (std::size_t order = 1; order <= max_order; ++order) {
                std::vector<int> d(ndim, 0);
                d[axis] = static_cast<int>(order);
                labels.push_back(TermLabel::derivative(s, d));
            }
    std::sort(labels.begin(), labels.end(), grlex_less);

    const std::size_t n = field.nx * field.ny * field.nt;
    ValueTable table;
    std::vector<std::unique_ptr<PolyfitFilter>> fx, fy;
    for (std::size_t order = 1; order <= max_order; ++order) {
        fx.push_back(std::make_unique<PolyfitFilter>(spec, order, field.dx()));
        if (ndim == 2) fy.push_back(std::make_unique<PolyfitFilter>(spec, order, field.dy()));
    }
    for (std::size_t s = 0; s < field.species.size(); ++s) {
        const Vector& u = field.values[s];
        for (std::size_t order = 1; order <= max_order; ++order) {
            Vector dx_col(n, 0.0);
            for (std::size_t it = 0; it < field.nt; ++it)
                for (std::size_t iy = 0; iy < field.ny; ++iy) {
                    const double* line = u.data() + field.index(0, iy, it);
                    for (std::size_t ix = 0; ix < field.nx; ++ix)
                        dx_col[field.index(ix, iy, it)] =
                            fx[order - 1]->eval(line, field.nx, ix);
                }
            std::vector<int> d(ndim, 0);
            d[0] = static_cast<int>(order);
            table[{field.species[s], d}] = std::move(dx_col);
            if (ndim == 2) {
                Vector dy_col(n, 0.0);
                for (std::size_t it = 0; it < field.nt; ++it)
                    for (std::size_t ix = 0; ix < field.nx; ++ix) {
                        const double* col0 = u.data() + field.index(ix, 0, it);
                        for (std::size_t iy = 0; iy < field.ny; ++iy)
                            dy_col[field.index(ix, iy, it)] =
                                fy[order - 1]->eval_strided(col0, field.nx, field.ny, iy);
                    }
                std::vector<int> dd(ndim, 0);
                dd[1] = static_cast<int>(order);
                table[{field.species[s], dd}] = std::move(dy_col);
            }
        }
    }
    return build_dictionary(std::move(labels), table, n);
}

/// Block-diagonal stacking of per-equation (or per-location) dictionaries
/// with their targets. Column k of block b occupies composite column
/// b_offset + k, and its rows outside block b are exactly zero.
inline std::pair<Dictionary, Vector> stack_blocks(const std::vector<Dictionary>& blocks,
                                                  const std::vector<Vector>& targets,
                                                  bool require_uniform_width = false) {
    require(!blocks.empty(), errc::invalid_argument, "stack_blocks: no blocks");
    require(blocks.size() == targets.size(), errc::dimension_mismatch,
            "stack_blocks: one target per block required");
    if (require_uniform_width)
        for (const auto& b : blocks)
            require(b.cols() == blocks.front().cols(), errc::dimension_mismatch,
                    "stack_blocks: uniform width requested but block widths differ");

    std::size_t total_rows = 0, total_cols = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        require(blocks[b].rows() == targets[b].size(), errc::dimension_mismatch,
                "stack_blocks: target length mismatch in block " + std::to_string(b));
        require(!blocks[b].is_composite(), errc::invalid_argument,
                "stack_blocks: nested composite blocks are not supported");
        total_rows += blocks[b].rows();
        total_cols += blocks[b].cols();
    }

    Dictionary out;
    out.matrix = DenseMatrix(total_rows, total_cols);
    Vector target(total_rows, 0.0);
    std::size_t r0 = 0, c0 = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const Dictionary& d = blocks[b];
        for (std::size_t i = 0; i < d.rows(); ++i)
            for (std::size_t j = 0; j < d.cols(); ++j) out.matrix(r0 + i, c0 + j) = d.matrix(i, j);
        for (std::size_t i = 0; i < d.rows(); ++i) target[r0 + i] = targets[b][i];
        std::string name = d.blocks.front().name.empty() ? "b" + std::to_string(b + 1)
                                                         : d.blocks.front().name;
        out.blocks.push_back({name, r0, d.rows(), c0, d.cols()});
        for (std::size_t j = 0; j < d.cols(); ++j) {
            out.labels.push_back(d.labels[j]);
            out.block_of_col.push_back(b);
        }
        r0 += d.rows();
        c0 += d.cols();
    }
    return {std::move(out), std::move(target)};
}

}  // namespace groupsparse
