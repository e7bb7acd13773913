#pragma once

#include <string>
#include <vector>

#include "ncgpi1/algebra.hpp"

namespace ncg {

struct CheckItem {
    std::string name;
    bool pass = true;
    std::string witness; // first violating tuple, when failing
    double margin = 0.0; // worst observed residual magnitude
};

struct CheckReport {
    std::vector<CheckItem> items;

    bool all_pass() const {
        for (const auto& it : items)
            if (!it.pass) return false;
        return true;
    }
    const CheckItem& operator[](const std::string& name) const {
        for (const auto& it : items)
            if (it.name == name) return it;
        throw Error("no check named " + name);
    }
    std::string to_text() const {
        std::string s;
        for (const auto& it : items) {
            s += (it.pass ? "[PASS] " : "[FAIL] ") + it.name;
            if (!it.pass && !it.witness.empty()) s += "  witness: " + it.witness;
            s += "\n";
        }
        return s;
    }
};

namespace detail {

class AxiomProbe {
  public:
    explicit AxiomProbe(const AlgebraPtr& A) : A_(A), tol_(A->tolerance()) {}

    CheckItem item(const std::string& name) const {
        CheckItem it;
        it.name = name;
        return it;
    }

    void record(CheckItem& it, const AlgebraElement& residual, const std::string& witness) const {
        double mag = 0.0;
        for (const auto& [k, c] : residual.coords()) mag = std::max(mag, c.abs());
        it.margin = std::max(it.margin, mag);
        if (!residual.is_zero(A_->mode() == ScalarMode::numeric ? tol_ : 0.0) && it.pass) {
            it.pass = false;
            it.witness = witness + "  residual: " + residual.to_string();
        }
    }

    AlgebraElement b(int i) const { return AlgebraElement::basis(A_, i); }

  private:
    AlgebraPtr A_;
    double tol_;
};

} // namespace detail

/// Evaluates the defining identities of a truncated dga on every basis tuple
/// whose result stays inside the window ("interior window" semantics: tuples
/// that would land past max_degree, and d*d on the top degree, are skipped).
inline CheckReport check_dga_axioms(const AlgebraPtr& A) {
    detail::AxiomProbe probe(A);
    CheckReport rep;
    const int N = static_cast<int>(A->size());
    const int D = A->max_degree();
    const AlgebraElement one = AlgebraElement::unit(A);

    CheckItem unit_law = probe.item("unit_law");
    for (int i = 0; i < N; ++i) {
        AlgebraElement bi = probe.b(i);
        probe.record(unit_law, mul(one, bi) - bi, "1*" + A->symbol(i).name);
        probe.record(unit_law, mul(bi, one) - bi, A->symbol(i).name + "*1");
    }
    rep.items.push_back(unit_law);

    CheckItem degree_rule = probe.item("degree_additivity");
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            if (A->degree(i) + A->degree(j) > D) continue;
            const auto& entry = A->product(i, j);
            if (!entry) continue;
            for (const auto& [k, c] : *entry) {
                if (A->degree(k) != A->degree(i) + A->degree(j) && !c.is_zero(0.0)) {
                    if (degree_rule.pass) {
                        degree_rule.pass = false;
                        degree_rule.witness =
                            A->symbol(i).name + "*" + A->symbol(j).name + " hits degree " +
                            std::to_string(A->degree(k));
                    }
                }
            }
        }
    rep.items.push_back(degree_rule);

    CheckItem assoc = probe.item("associativity");
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            if (A->degree(i) + A->degree(j) > D) continue;
            if (!A->product(i, j)) continue;
            for (int k = 0; k < N; ++k) {
                if (A->degree(i) + A->degree(j) + A->degree(k) > D) continue;
                if (!A->product(j, k)) continue;
                AlgebraElement bi = probe.b(i), bj = probe.b(j), bk = probe.b(k);
                AlgebraElement lhs, rhs;
                try {
                    lhs = mul(mul(bi, bj), bk);
                    rhs = mul(bi, mul(bj, bk));
                } catch (const OutOfWindow&) {
                    continue; // an intermediate leaves the window: untestable triple
                }
                probe.record(assoc, lhs - rhs,
                             "(" + A->symbol(i).name + "," + A->symbol(j).name + "," +
                                 A->symbol(k).name + ")");
            }
        }
    rep.items.push_back(assoc);

    CheckItem d_degree = probe.item("d_degree_plus_one");
    for (int i = 0; i < N; ++i) {
        if (A->degree(i) + 1 > D) continue;
        const auto& entry = A->differential_of(i);
        if (!entry) continue;
        for (const auto& [k, c] : *entry)
            if (A->degree(k) != A->degree(i) + 1 && !c.is_zero(0.0) && d_degree.pass) {
                d_degree.pass = false;
                d_degree.witness = "d(" + A->symbol(i).name + ")";
            }
    }
    rep.items.push_back(d_degree);

    CheckItem dsq = probe.item("d_squared_zero");
    for (int i = 0; i < N; ++i) {
        if (A->degree(i) + 2 > D) continue;
        try {
            probe.record(dsq, apply_d(apply_d(probe.b(i))), "d(d(" + A->symbol(i).name + "))");
        } catch (const OutOfWindow&) {
            continue;
        }
    }
    rep.items.push_back(dsq);

    CheckItem leibniz = probe.item("graded_leibniz");
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            if (A->degree(i) + A->degree(j) + 1 > D) continue;
            AlgebraElement bi = probe.b(i), bj = probe.b(j);
            AlgebraElement lhs, rhs;
            try {
                lhs = apply_d(mul(bi, bj));
                AlgebraElement t1 = mul(apply_d(bi), bj);
                AlgebraElement t2 = mul(bi, apply_d(bj));
                rhs = (A->degree(i) % 2 != 0) ? t1 - t2 : t1 + t2;
            } catch (const OutOfWindow&) {
                continue;
            }
            probe.record(leibniz, lhs - rhs,
                         "d(" + A->symbol(i).name + "*" + A->symbol(j).name + ")");
        }
    rep.items.push_back(leibniz);

    if (A->has_star()) {
        CheckItem inv = probe.item("star_involution");
        CheckItem anti = probe.item("star_antimultiplicative");
        CheckItem stard = probe.item("star_commutes_with_d");
        probe.record(inv, star(star(one)) - one, "1**");
        for (int i = 0; i < N; ++i) {
            AlgebraElement bi = probe.b(i);
            probe.record(inv, star(star(bi)) - bi, A->symbol(i).name + "**");
        }
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                if (A->degree(i) + A->degree(j) > D) continue;
                AlgebraElement bi = probe.b(i), bj = probe.b(j);
                try {
                    probe.record(anti, star(mul(bi, bj)) - mul(star(bj), star(bi)),
                                 "(" + A->symbol(i).name + "*" + A->symbol(j).name + ")*");
                } catch (const OutOfWindow&) {
                    continue;
                }
            }
        for (int i = 0; i < N; ++i) {
            if (A->degree(i) + 1 > D) continue;
            AlgebraElement bi = probe.b(i);
            try {
                probe.record(stard, apply_d(star(bi)) - star(apply_d(bi)),
                             "d(" + A->symbol(i).name + "*)");
            } catch (const OutOfWindow&) {
                continue;
            }
        }
        rep.items.push_back(inv);
        rep.items.push_back(anti);
        rep.items.push_back(stard);
    }

    return rep;
}

/// True iff the graded commutator of every in-window basis pair vanishes.
inline bool is_graded_commutative(const AlgebraPtr& A) {
    const int N = static_cast<int>(A->size());
    const double tol = A->mode() == ScalarMode::numeric ? A->tolerance() : 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) {
            if (A->degree(i) + A->degree(j) > A->max_degree()) continue;
            if (!A->product(i, j) || !A->product(j, i)) continue;
            AlgebraElement c = graded_commutator(AlgebraElement::basis(A, i),
                                                 AlgebraElement::basis(A, j));
            if (!c.is_zero(tol)) return false;
        }
    return true;
}

} // namespace ncg
