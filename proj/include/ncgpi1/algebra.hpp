#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ncgpi1/errors.hpp"
#include "ncgpi1/scalar.hpp"

namespace ncg {

enum class Truncation { strict, drop };

inline const char* to_string(Truncation t) {
    return t == Truncation::strict ? "strict" : "drop";
}

struct BasisSymbol {
    std::string name;
    int degree = 0;
};

/// Sparse coordinate vector over a graded basis; zero entries are never stored.
using SparseVec = std::map<int, Scalar>;

struct StarEntry {
    int basis = -1;
    Scalar coeff;
};

/// Raw construction data for a truncated graded algebra. Product and
/// differential entries that fall outside the truncation window are stored
/// as nullopt; applying them is governed by the truncation policy.
struct AlgebraData {
    int max_degree = 0;
    ScalarMode mode = ScalarMode::exact;
    Truncation policy = Truncation::strict;
    double tolerance = 1e-12;
    std::vector<BasisSymbol> basis;
    SparseVec unit;
    std::map<std::pair<int, int>, std::optional<SparseVec>> products;
    std::map<int, std::optional<SparseVec>> differential;
    std::optional<std::vector<StarEntry>> star;
};

class GradedBasisAlgebra {
  public:
    explicit GradedBasisAlgebra(AlgebraData data) : d_(std::move(data)) {
        validate();
        index_by_degree();
    }

    int max_degree() const { return d_.max_degree; }
    ScalarMode mode() const { return d_.mode; }
    Truncation policy() const { return d_.policy; }
    double tolerance() const { return d_.tolerance; }
    std::size_t size() const { return d_.basis.size(); }
    const BasisSymbol& symbol(int i) const { return d_.basis[static_cast<std::size_t>(i)]; }
    int degree(int i) const { return symbol(i).degree; }
    const SparseVec& unit_coords() const { return d_.unit; }
    bool has_star() const { return d_.star.has_value(); }

    const std::vector<int>& basis_of_degree(int k) const {
        static const std::vector<int> empty;
        auto it = by_degree_.find(k);
        return it == by_degree_.end() ? empty : it->second;
    }

    int index_of(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end()) throw InvalidInput("unknown basis symbol: " + name);
        return it->second;
    }

    /// Product of basis elements i and j; nullopt when the result leaves the
    /// truncation window.
    const std::optional<SparseVec>& product(int i, int j) const {
        auto it = d_.products.find({i, j});
        if (it != d_.products.end()) return it->second;
        // Degree-window overflow is implicit: pairs beyond the window are
        // not stored.
        if (degree(i) + degree(j) > d_.max_degree) return out_of_window_;
        throw InvalidInput("missing product entry for (" + symbol(i).name + ", " +
                           symbol(j).name + ")");
    }

    const std::optional<SparseVec>& differential_of(int i) const {
        auto it = d_.differential.find(i);
        if (it != d_.differential.end()) return it->second;
        if (degree(i) + 1 > d_.max_degree) return out_of_window_;
        throw InvalidInput("missing differential entry for " + symbol(i).name);
    }

    const StarEntry& star_of(int i) const {
        if (!d_.star) throw NoStar("algebra has no star structure");
        return (*d_.star)[static_cast<std::size_t>(i)];
    }

    const AlgebraData& data() const { return d_; }

  private:
    void validate() {
        if (d_.max_degree < 0) throw InvalidInput("max_degree must be nonnegative");
        if (d_.tolerance < 0) throw InvalidInput("tolerance must be nonnegative");
        for (std::size_t i = 0; i < d_.basis.size(); ++i) {
            const auto& b = d_.basis[i];
            if (b.name.empty()) throw InvalidInput("empty basis name");
            if (b.degree < 0 || b.degree > d_.max_degree)
                throw InvalidInput("basis degree out of window: " + b.name);
            if (!by_name_.emplace(b.name, static_cast<int>(i)).second)
                throw InvalidInput("duplicate basis name: " + b.name);
        }
        check_vec(d_.unit, 0, "unit");
        for (const auto& [key, val] : d_.products) {
            check_index(key.first);
            check_index(key.second);
            if (val)
                check_vec(*val, degree(key.first) + degree(key.second),
                          "product(" + symbol(key.first).name + "," + symbol(key.second).name + ")");
        }
        for (const auto& [i, val] : d_.differential) {
            check_index(i);
            if (val) check_vec(*val, degree(i) + 1, "d(" + symbol(i).name + ")");
        }
        if (d_.star) {
            if (d_.star->size() != d_.basis.size())
                throw InvalidInput("star table size mismatch");
            for (std::size_t i = 0; i < d_.star->size(); ++i) {
                const auto& e = (*d_.star)[i];
                check_index(e.basis);
                if (degree(e.basis) != degree(static_cast<int>(i)))
                    throw InvalidInput("star must preserve degree");
                check_scalar(e.coeff, "star coefficient");
            }
        }
    }

    void check_index(int i) const {
        if (i < 0 || static_cast<std::size_t>(i) >= d_.basis.size())
            throw InvalidInput("basis index out of range");
    }
    void check_scalar(const Scalar& s, const std::string& where) const {
        if (s.mode() != d_.mode)
            throw ScalarModeMismatch("scalar mode mismatch in " + where);
    }
    void check_vec(const SparseVec& v, int expected_degree, const std::string& where) const {
        for (const auto& [i, c] : v) {
            check_index(i);
            check_scalar(c, where);
            if (expected_degree >= 0 && degree(i) != expected_degree)
                throw InvalidInput("degree violation in " + where);
        }
    }

    void index_by_degree() {
        for (std::size_t i = 0; i < d_.basis.size(); ++i)
            by_degree_[d_.basis[i].degree].push_back(static_cast<int>(i));
    }

    AlgebraData d_;
    std::map<std::string, int> by_name_;
    std::map<int, std::vector<int>> by_degree_;
    std::optional<SparseVec> out_of_window_; // = nullopt
};

using AlgebraPtr = std::shared_ptr<const GradedBasisAlgebra>;

inline AlgebraPtr make_algebra(AlgebraData data) {
    return std::make_shared<const GradedBasisAlgebra>(std::move(data));
}

/// Sparse element of a GradedBasisAlgebra; the universal value type.
class AlgebraElement {
  public:
    AlgebraElement() = default;
    explicit AlgebraElement(AlgebraPtr owner) : owner_(std::move(owner)) {}
    AlgebraElement(AlgebraPtr owner, SparseVec coords)
        : owner_(std::move(owner)), coords_(std::move(coords)) {
        prune();
    }

    static AlgebraElement zero(const AlgebraPtr& a) { return AlgebraElement(a); }
    static AlgebraElement unit(const AlgebraPtr& a) {
        return AlgebraElement(a, a->unit_coords());
    }
    static AlgebraElement basis(const AlgebraPtr& a, int i) {
        SparseVec v;
        v[i] = Scalar::one(a->mode());
        return AlgebraElement(a, std::move(v));
    }
    static AlgebraElement basis(const AlgebraPtr& a, const std::string& name) {
        return basis(a, a->index_of(name));
    }

    const AlgebraPtr& owner() const { return owner_; }
    const SparseVec& coords() const { return coords_; }
    bool empty() const { return coords_.empty(); }

    bool is_zero(double tol) const {
        for (const auto& [i, c] : coords_)
            if (!c.is_zero(tol)) return false;
        return true;
    }
    bool is_zero() const { return is_zero(owner_ ? owner_->tolerance() : 0.0); }

    bool is_homogeneous() const {
        int deg = -1;
        for (const auto& [i, c] : coords_) {
            int d = owner_->degree(i);
            if (deg == -1) deg = d;
            else if (deg != d) return false;
        }
        return true;
    }

    /// Degree of a homogeneous element; zero elements report 0.
    int degree() const {
        int deg = -1;
        for (const auto& [i, c] : coords_) {
            int d = owner_->degree(i);
            if (deg == -1) deg = d;
            else if (deg != d) throw Error("degree() on non-homogeneous element");
        }
        return deg < 0 ? 0 : deg;
    }

    std::map<int, AlgebraElement> homogeneous_components() const {
        std::map<int, SparseVec> parts;
        for (const auto& [i, c] : coords_) parts[owner_->degree(i)][i] = c;
        std::map<int, AlgebraElement> out;
        for (auto& [d, v] : parts) out.emplace(d, AlgebraElement(owner_, std::move(v)));
        return out;
    }

    AlgebraElement component(int deg) const {
        SparseVec v;
        for (const auto& [i, c] : coords_)
            if (owner_->degree(i) == deg) v[i] = c;
        return AlgebraElement(owner_, std::move(v));
    }

    AlgebraElement operator+(const AlgebraElement& o) const {
        check_owner(o);
        SparseVec v = coords_;
        for (const auto& [i, c] : o.coords_) {
            auto it = v.find(i);
            if (it == v.end()) v[i] = c;
            else it->second += c;
        }
        return AlgebraElement(owner_, std::move(v));
    }
    AlgebraElement operator-(const AlgebraElement& o) const { return *this + (-o); }
    AlgebraElement operator-() const {
        SparseVec v = coords_;
        for (auto& [i, c] : v) c = -c;
        return AlgebraElement(owner_, std::move(v));
    }
    AlgebraElement operator*(const Scalar& s) const {
        if (owner_ && s.mode() != owner_->mode())
            throw ScalarModeMismatch("scalar mode does not match algebra mode");
        SparseVec v = coords_;
        for (auto& [i, c] : v) c = c * s;
        return AlgebraElement(owner_, std::move(v));
    }

    bool equals(const AlgebraElement& o, double tol) const {
        check_owner(o);
        return (*this - o).is_zero(tol);
    }

    std::string to_string() const {
        if (coords_.empty()) return "0";
        std::string s;
        bool first = true;
        for (const auto& [i, c] : coords_) {
            if (!first) s += " + ";
            s += "(" + c.to_string() + ")*" + owner_->symbol(i).name;
            first = false;
        }
        return s;
    }

    void check_owner(const AlgebraElement& o) const {
        if (owner_.get() != o.owner_.get())
            throw OwnerMismatch("elements belong to different algebras");
    }

  private:
    void prune() {
        for (auto it = coords_.begin(); it != coords_.end();)
            it = it->second.is_zero(0.0) ? coords_.erase(it) : std::next(it);
    }

    AlgebraPtr owner_;
    SparseVec coords_;
};

namespace detail {

inline void accumulate(SparseVec& acc, const SparseVec& v, const Scalar& factor) {
    for (const auto& [k, s] : v) {
        Scalar term = factor * s;
        auto it = acc.find(k);
        if (it == acc.end()) acc[k] = term;
        else it->second += term;
    }
}

} // namespace detail

/// Bilinear extension of the structure constants. In strict truncation a
/// product term that leaves the window throws OutOfWindow; in drop mode such
/// terms are projected away.
inline AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b) {
    a.check_owner(b);
    const AlgebraPtr& A = a.owner();
    SparseVec acc;
    for (const auto& [i, ca] : a.coords()) {
        for (const auto& [j, cb] : b.coords()) {
            const auto& entry = A->product(i, j);
            if (!entry) {
                if (A->policy() == Truncation::strict)
                    throw OutOfWindow("product " + A->symbol(i).name + " * " +
                                      A->symbol(j).name + " leaves the truncation window");
                continue;
            }
            detail::accumulate(acc, *entry, ca * cb);
        }
    }
    return AlgebraElement(A, std::move(acc));
}

inline AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
    return mul(a, b);
}

/// The differential, extended linearly.
inline AlgebraElement apply_d(const AlgebraElement& a) {
    const AlgebraPtr& A = a.owner();
    SparseVec acc;
    for (const auto& [i, c] : a.coords()) {
        const auto& entry = A->differential_of(i);
        if (!entry) {
            if (A->policy() == Truncation::strict)
                throw OutOfWindow("d(" + A->symbol(i).name + ") leaves the truncation window");
            continue;
        }
        detail::accumulate(acc, *entry, c);
    }
    return AlgebraElement(A, std::move(acc));
}

/// Antilinear star, when the algebra carries one.
inline AlgebraElement star(const AlgebraElement& a) {
    const AlgebraPtr& A = a.owner();
    SparseVec acc;
    for (const auto& [i, c] : a.coords()) {
        const StarEntry& e = A->star_of(i);
        detail::accumulate(acc, SparseVec{{e.basis, e.coeff}}, c.conj());
    }
    return AlgebraElement(A, std::move(acc));
}

/// [alpha, eps] = alpha*eps - (-1)^{|alpha||eps|} eps*alpha, extended
/// bilinearly over homogeneous components.
inline AlgebraElement graded_commutator(const AlgebraElement& alpha,
                                        const AlgebraElement& eps) {
    alpha.check_owner(eps);
    const AlgebraPtr& A = alpha.owner();
    AlgebraElement out = AlgebraElement::zero(A);
    for (const auto& [da, pa] : alpha.homogeneous_components()) {
        for (const auto& [de, pe] : eps.homogeneous_components()) {
            AlgebraElement fwd = mul(pa, pe);
            AlgebraElement bwd = mul(pe, pa);
            if ((da * de) % 2 != 0) out = out + fwd + bwd;
            else out = out + fwd - bwd;
        }
    }
    return out;
}

} // namespace ncg
