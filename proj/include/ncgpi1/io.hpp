#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ncgpi1/algebra.hpp"
#include "ncgpi1/connection.hpp"
#include "ncgpi1/torus.hpp"
#include "ncgpi1/transport.hpp"

namespace ncg {

using Json = nlohmann::ordered_json;

inline constexpr int format_version_major = 1;

namespace io {

inline void check_format_version(const Json& j, const std::string& what) {
    if (!j.contains("format_version") || !j["format_version"].is_number_integer())
        throw InvalidInput(what + ": missing format_version");
    int v = j["format_version"].get<int>();
    if (v > format_version_major)
        throw InvalidInput(what + ": format_version " + std::to_string(v) +
                           " is newer than supported " + std::to_string(format_version_major));
}

inline void reject_unknown_keys(const Json& j, const std::set<std::string>& allowed,
                                const std::string& what) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw InvalidInput(what + ": unknown field '" + it.key() + "'");
}

inline Json scalar_to_json(const Scalar& s) {
    Json j;
    if (s.is_exact()) {
        j["re"] = rat_to_string(s.re_rational());
        j["im"] = rat_to_string(s.im_rational());
    } else {
        j["re"] = s.to_complex().real();
        j["im"] = s.to_complex().imag();
    }
    return j;
}

inline Scalar scalar_from_json(const Json& j, ScalarMode mode, const std::string& where) {
    if (!j.contains("re") || !j.contains("im")) throw InvalidInput(where + ": term needs re/im");
    const Json& re = j["re"];
    const Json& im = j["im"];
    if (re.is_string() != im.is_string())
        throw InvalidInput(where + ": mixed string/number scalar");
    if (re.is_string()) {
        if (mode != ScalarMode::exact)
            throw InvalidInput(where + ": exact scalar in a numeric-mode file");
        return Scalar::exact(rat_from_string(re.get<std::string>()),
                             rat_from_string(im.get<std::string>()));
    }
    if (!re.is_number() || !im.is_number())
        throw InvalidInput(where + ": scalar components must be numbers or rational strings");
    if (mode != ScalarMode::numeric)
        throw InvalidInput(where + ": numeric scalar in an exact-mode file");
    return Scalar::numeric(re.get<double>(), im.get<double>());
}

inline Json terms_to_json(const AlgebraPtr& A, const SparseVec& v) {
    Json arr = Json::array();
    for (const auto& [i, c] : v) {
        Json t = scalar_to_json(c);
        Json term;
        term["basis"] = A->symbol(i).name;
        term["re"] = t["re"];
        term["im"] = t["im"];
        arr.push_back(std::move(term));
    }
    return arr;
}

inline SparseVec terms_from_json(const Json& arr, const GradedBasisAlgebra& A, ScalarMode mode,
                                 const std::string& where) {
    if (!arr.is_array()) throw InvalidInput(where + ": expected a term list");
    SparseVec v;
    for (const auto& t : arr) {
        reject_unknown_keys(t, {"basis", "re", "im"}, where);
        if (!t.contains("basis")) throw InvalidInput(where + ": term needs a basis name");
        int idx = A.index_of(t["basis"].get<std::string>());
        Scalar c = scalar_from_json(t, mode, where);
        if (!c.is_zero(0.0)) v[idx] = c;
    }
    return v;
}

} // namespace io

inline Json algebra_to_json(const AlgebraPtr& A) {
    Json j;
    j["format_version"] = format_version_major;
    j["kind"] = "algebra";
    j["scalar_mode"] = to_string(A->mode());
    j["truncation"] = to_string(A->policy());
    if (A->mode() == ScalarMode::numeric) j["tolerance"] = A->tolerance();
    j["max_degree"] = A->max_degree();
    Json basis = Json::array();
    for (std::size_t i = 0; i < A->size(); ++i) {
        Json b;
        b["name"] = A->symbol(static_cast<int>(i)).name;
        b["degree"] = A->symbol(static_cast<int>(i)).degree;
        basis.push_back(std::move(b));
    }
    j["basis"] = std::move(basis);
    j["unit"] = io::terms_to_json(A, A->unit_coords());

    Json products = Json::array();
    const int N = static_cast<int>(A->size());
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k) {
            if (A->degree(i) + A->degree(k) > A->max_degree()) continue;
            Json p;
            p["left"] = A->symbol(i).name;
            p["right"] = A->symbol(k).name;
            const auto& entry = A->product(i, k);
            if (entry) p["result"] = io::terms_to_json(A, *entry);
            else p["result"] = "out_of_window";
            products.push_back(std::move(p));
        }
    j["products"] = std::move(products);

    Json diff = Json::array();
    for (int i = 0; i < N; ++i) {
        if (A->degree(i) + 1 > A->max_degree()) continue;
        Json e;
        e["basis"] = A->symbol(i).name;
        const auto& entry = A->differential_of(i);
        if (entry) e["result"] = io::terms_to_json(A, *entry);
        else e["result"] = "out_of_window";
        diff.push_back(std::move(e));
    }
    j["differential"] = std::move(diff);

    if (A->has_star()) {
        Json st = Json::array();
        for (int i = 0; i < N; ++i) {
            const StarEntry& e = A->star_of(i);
            Json s = io::scalar_to_json(e.coeff);
            Json row;
            row["basis"] = A->symbol(i).name;
            row["result_basis"] = A->symbol(e.basis).name;
            row["re"] = s["re"];
            row["im"] = s["im"];
            st.push_back(std::move(row));
        }
        j["star"] = std::move(st);
    }
    return j;
}

inline AlgebraPtr algebra_from_json(const Json& j) {
    io::check_format_version(j, "algebra");
    io::reject_unknown_keys(j,
                            {"format_version", "kind", "scalar_mode", "truncation", "tolerance",
                             "max_degree", "basis", "unit", "products", "differential", "star"},
                            "algebra");
    if (j.value("kind", "algebra") != std::string("algebra"))
        throw InvalidInput("algebra: wrong kind field");
    AlgebraData d;
    std::string mode = j.at("scalar_mode").get<std::string>();
    if (mode == "exact") d.mode = ScalarMode::exact;
    else if (mode == "numeric") d.mode = ScalarMode::numeric;
    else throw InvalidInput("algebra: scalar_mode must be exact or numeric");
    std::string trunc = j.value("truncation", "strict");
    if (trunc == "strict") d.policy = Truncation::strict;
    else if (trunc == "drop") d.policy = Truncation::drop;
    else throw InvalidInput("algebra: truncation must be strict or drop");
    if (j.contains("tolerance")) d.tolerance = j["tolerance"].get<double>();
    d.max_degree = j.at("max_degree").get<int>();
    if (!j.contains("basis") || j["basis"].empty())
        throw InvalidInput("algebra: empty basis");
    for (const auto& b : j["basis"]) {
        io::reject_unknown_keys(b, {"name", "degree"}, "algebra basis");
        d.basis.push_back({b.at("name").get<std::string>(), b.at("degree").get<int>()});
    }

    // two-phase build: a bare algebra first, so names resolve while we read
    // the structure tables
    AlgebraData skeleton = d;
    for (std::size_t i = 0; i < d.basis.size(); ++i)
        for (std::size_t k = 0; k < d.basis.size(); ++k)
            if (d.basis[i].degree + d.basis[k].degree <= d.max_degree)
                skeleton.products[{static_cast<int>(i), static_cast<int>(k)}] = SparseVec{};
    for (std::size_t i = 0; i < d.basis.size(); ++i)
        if (d.basis[i].degree + 1 <= d.max_degree)
            skeleton.differential[static_cast<int>(i)] = SparseVec{};
    GradedBasisAlgebra names(skeleton);

    d.unit = io::terms_from_json(j.at("unit"), names, d.mode, "algebra unit");
    for (const auto& p : j.at("products")) {
        io::reject_unknown_keys(p, {"left", "right", "result"}, "algebra products");
        int l = names.index_of(p.at("left").get<std::string>());
        int r = names.index_of(p.at("right").get<std::string>());
        if (p.at("result").is_string()) {
            if (p["result"].get<std::string>() != "out_of_window")
                throw InvalidInput("algebra products: bad result marker");
            d.products[{l, r}] = std::nullopt;
        } else {
            d.products[{l, r}] = io::terms_from_json(p["result"], names, d.mode,
                                                     "algebra product result");
        }
    }
    for (const auto& e : j.at("differential")) {
        io::reject_unknown_keys(e, {"basis", "result"}, "algebra differential");
        int i = names.index_of(e.at("basis").get<std::string>());
        if (e.at("result").is_string()) {
            if (e["result"].get<std::string>() != "out_of_window")
                throw InvalidInput("algebra differential: bad result marker");
            d.differential[i] = std::nullopt;
        } else {
            d.differential[i] =
                io::terms_from_json(e["result"], names, d.mode, "algebra differential");
        }
    }
    if (j.contains("star")) {
        std::vector<StarEntry> st(d.basis.size());
        std::vector<bool> seen(d.basis.size(), false);
        for (const auto& s : j["star"]) {
            io::reject_unknown_keys(s, {"basis", "result_basis", "re", "im"}, "algebra star");
            int i = names.index_of(s.at("basis").get<std::string>());
            st[static_cast<std::size_t>(i)] = {
                names.index_of(s.at("result_basis").get<std::string>()),
                io::scalar_from_json(s, d.mode, "algebra star")};
            seen[static_cast<std::size_t>(i)] = true;
        }
        for (bool b : seen)
            if (!b) throw InvalidInput("algebra star: incomplete table");
        d.star = std::move(st);
    }

    // completeness: every in-window pair and differential must be present
    for (std::size_t i = 0; i < d.basis.size(); ++i) {
        for (std::size_t k = 0; k < d.basis.size(); ++k)
            if (d.basis[i].degree + d.basis[k].degree <= d.max_degree &&
                !d.products.count({static_cast<int>(i), static_cast<int>(k)}))
                throw InvalidInput("algebra: missing product entry " + d.basis[i].name + " * " +
                                   d.basis[k].name);
        if (d.basis[i].degree + 1 <= d.max_degree &&
            !d.differential.count(static_cast<int>(i)))
            throw InvalidInput("algebra: missing differential entry for " + d.basis[i].name);
    }
    return make_algebra(std::move(d));
}

inline Json matrix_to_json(const AlgebraPtr& A, const ElementMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t k = 0; k < m.cols(); ++k)
            row.push_back(io::terms_to_json(A, m(i, k).coords()));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ElementMatrix matrix_from_json(const Json& rows, const AlgebraPtr& A,
                                      const std::string& where) {
    if (!rows.is_array() || rows.empty()) throw InvalidInput(where + ": expected a matrix");
    const std::size_t r = rows.size();
    const std::size_t c = rows[0].size();
    ElementMatrix m(r, c, AlgebraElement::zero(A));
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw InvalidInput(where + ": ragged matrix");
        for (std::size_t k = 0; k < c; ++k)
            m(i, k) = AlgebraElement(
                A, io::terms_from_json(rows[i][k], *A, A->mode(), where));
    }
    return m;
}

inline Json connection_to_json(const FgpConnection& c) {
    Json j;
    j["format_version"] = format_version_major;
    j["kind"] = "connection";
    j["algebra"] = algebra_to_json(c.owner());
    Json mod;
    mod["ambient_rank"] = c.module.ambient_rank;
    mod["projection"] = matrix_to_json(c.owner(), c.module.projection);
    j["module"] = std::move(mod);
    j["kappa"] = matrix_to_json(c.owner(), c.kappa);
    return j;
}

inline FgpConnection connection_from_json(const Json& j, const std::string& base_dir = "");

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InvalidInput("cannot parse JSON in " + path + ": " + e.what());
    }
    return j;
}

inline FgpConnection connection_from_json(const Json& j, const std::string& base_dir) {
    io::check_format_version(j, "connection");
    io::reject_unknown_keys(j, {"format_version", "kind", "algebra", "module", "kappa"},
                            "connection");
    AlgebraPtr A;
    if (j.at("algebra").is_string()) {
        std::string path = j["algebra"].get<std::string>();
        if (!base_dir.empty() && !path.empty() && path[0] != '/')
            path = base_dir + "/" + path;
        A = algebra_from_json(load_json_file(path));
    } else {
        A = algebra_from_json(j["algebra"]);
    }
    const Json& mod = j.at("module");
    io::reject_unknown_keys(mod, {"ambient_rank", "projection"}, "connection module");
    ElementMatrix p = matrix_from_json(mod.at("projection"), A, "connection projection");
    if (mod.contains("ambient_rank") &&
        mod["ambient_rank"].get<std::size_t>() != p.rows())
        throw InvalidInput("connection: ambient_rank does not match the projection");
    FgpModule m = FgpModule::from_projection(A, std::move(p));
    ElementMatrix kappa = matrix_from_json(j.at("kappa"), A, "connection kappa");
    return FgpConnection::make(std::move(m), std::move(kappa));
}

inline Json scalar_matrix_to_json(const Matrix<Scalar>& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) {
            const Scalar& s = m(i, k);
            Json pair = Json::array();
            if (s.is_exact()) {
                pair.push_back(rat_to_string(s.re_rational()));
                pair.push_back(rat_to_string(s.im_rational()));
            } else {
                pair.push_back(s.to_complex().real());
                pair.push_back(s.to_complex().imag());
            }
            row.push_back(std::move(pair));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

struct ScalarMatrixFile {
    ScalarMode mode = ScalarMode::numeric;
    Matrix<Scalar> matrix;
};

inline ScalarMatrixFile scalar_matrix_from_json(const Json& j) {
    io::check_format_version(j, "matrix");
    io::reject_unknown_keys(j, {"format_version", "kind", "scalar_mode", "rows"}, "matrix");
    ScalarMatrixFile out;
    std::string mode = j.at("scalar_mode").get<std::string>();
    if (mode == "exact") out.mode = ScalarMode::exact;
    else if (mode == "numeric") out.mode = ScalarMode::numeric;
    else throw InvalidInput("matrix: bad scalar_mode");
    const Json& rows = j.at("rows");
    if (!rows.is_array() || rows.empty() || !rows[0].is_array() || rows[0].empty())
        throw InvalidInput("matrix: rows must be a nonempty 2d array");
    out.matrix = Matrix<Scalar>(rows.size(), rows[0].size(), Scalar::zero(out.mode));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) throw InvalidInput("matrix: ragged rows");
        for (std::size_t k = 0; k < rows[i].size(); ++k) {
            const Json& p = rows[i][k];
            if (!p.is_array() || p.size() != 2)
                throw InvalidInput("matrix: entries are [re, im] pairs");
            if (out.mode == ScalarMode::exact)
                out.matrix(i, k) = Scalar::exact(rat_from_string(p[0].get<std::string>()),
                                                 rat_from_string(p[1].get<std::string>()));
            else out.matrix(i, k) = Scalar::numeric(p[0].get<double>(), p[1].get<double>());
        }
    }
    return out;
}

inline Json cmatrix_to_json(const CMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) {
            Json pair = Json::array();
            pair.push_back(m(i, k).real());
            pair.push_back(m(i, k).imag());
            row.push_back(std::move(pair));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline CMatrix cmatrix_from_json(const Json& rows, const std::string& where) {
    if (!rows.is_array() || rows.empty()) throw InvalidInput(where + ": expected a matrix");
    CMatrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) throw InvalidInput(where + ": ragged matrix");
        for (std::size_t k = 0; k < rows[i].size(); ++k) {
            const Json& p = rows[i][k];
            if (!p.is_array() || p.size() != 2)
                throw InvalidInput(where + ": entries are [re, im] pairs");
            m(i, k) = {p[0].get<double>(), p[1].get<double>()};
        }
    }
    return m;
}

inline Json torus_to_json(const TorusPresentation& T) {
    Json j;
    j["format_version"] = format_version_major;
    j["kind"] = "torus";
    j["n"] = T.n;
    j["radius"] = T.radius;
    j["truncation"] = to_string(T.policy);
    Json gens = Json::array();
    for (const auto& g : T.generator_names) gens.push_back(g);
    j["irrational_generators"] = std::move(gens);
    if (!T.bindings.empty()) {
        Json b;
        for (std::size_t i = 0; i < T.bindings.size(); ++i)
            b[T.generator_names[i]] = T.bindings[i];
        j["irrational_values"] = std::move(b);
    }
    Json theta = Json::array();
    for (const auto& row : T.theta) {
        Json jrow = Json::array();
        for (const auto& e : row) {
            Json je;
            je["rational"] = rat_to_string(e.rational);
            if (!T.generator_names.empty()) {
                Json irr;
                for (std::size_t g = 0; g < T.generator_names.size(); ++g)
                    irr[T.generator_names[g]] = rat_to_string(e.irr[g]);
                je["irrational"] = std::move(irr);
            }
            jrow.push_back(std::move(je));
        }
        theta.push_back(std::move(jrow));
    }
    j["theta"] = std::move(theta);
    return j;
}

inline TorusPresentation torus_from_json(const Json& j) {
    io::check_format_version(j, "torus");
    io::reject_unknown_keys(j,
                            {"format_version", "kind", "n", "radius", "truncation",
                             "irrational_generators", "irrational_values", "theta"},
                            "torus");
    TorusPresentation T;
    T.n = j.at("n").get<std::size_t>();
    T.radius = j.value("radius", 1L);
    std::string trunc = j.value("truncation", "strict");
    if (trunc == "strict") T.policy = Truncation::strict;
    else if (trunc == "drop") T.policy = Truncation::drop;
    else throw InvalidInput("torus: truncation must be strict or drop");
    if (j.contains("irrational_generators"))
        for (const auto& g : j["irrational_generators"])
            T.generator_names.push_back(g.get<std::string>());
    const Json& theta = j.at("theta");
    for (const auto& jrow : theta) {
        std::vector<ThetaEntry> row;
        for (const auto& je : jrow) {
            io::reject_unknown_keys(je, {"rational", "irrational"}, "torus theta entry");
            ThetaEntry e;
            e.rational = rat_from_string(je.value("rational", std::string("0")));
            e.irr.assign(T.generator_names.size(), Rational(0));
            if (je.contains("irrational"))
                for (auto it = je["irrational"].begin(); it != je["irrational"].end(); ++it) {
                    auto pos = std::find(T.generator_names.begin(), T.generator_names.end(),
                                         it.key());
                    if (pos == T.generator_names.end())
                        throw InvalidInput("torus: undeclared irrational generator " + it.key());
                    e.irr[static_cast<std::size_t>(pos - T.generator_names.begin())] =
                        rat_from_string(it.value().get<std::string>());
                }
            row.push_back(std::move(e));
        }
        T.theta.push_back(std::move(row));
    }
    if (j.contains("irrational_values")) {
        T.bindings.assign(T.generator_names.size(), 0.0);
        for (auto it = j["irrational_values"].begin(); it != j["irrational_values"].end(); ++it) {
            auto pos = std::find(T.generator_names.begin(), T.generator_names.end(), it.key());
            if (pos == T.generator_names.end())
                throw InvalidInput("torus: value for undeclared generator " + it.key());
            T.bindings[static_cast<std::size_t>(pos - T.generator_names.begin())] =
                it.value().get<double>();
        }
    }
    T.validate();
    return T;
}

struct TransportJob {
    MatrixPath omega;
    TransportOptions options;
    bool inverse_equation = false;
};

inline TransportJob transport_job_from_json(const Json& j) {
    io::check_format_version(j, "transport job");
    io::reject_unknown_keys(j,
                            {"format_version", "kind", "dimension", "omega", "method", "steps",
                             "terms", "tolerances", "equation"},
                            "transport job");
    TransportJob job;
    const Json& om = j.at("omega");
    io::reject_unknown_keys(om, {"kind", "data", "knots", "values"}, "transport omega");
    std::string kind = om.at("kind").get<std::string>();
    if (kind == "constant") {
        job.omega = MatrixPath::constant(cmatrix_from_json(om.at("data"), "omega"));
    } else if (kind == "polynomial") {
        std::vector<CMatrix> cs;
        for (const auto& c : om.at("data")) cs.push_back(cmatrix_from_json(c, "omega"));
        job.omega = MatrixPath::polynomial(std::move(cs));
    } else if (kind == "grid") {
        std::vector<double> knots;
        for (const auto& t : om.at("knots")) knots.push_back(t.get<double>());
        std::vector<CMatrix> vs;
        for (const auto& c : om.at("values")) vs.push_back(cmatrix_from_json(c, "omega"));
        job.omega = MatrixPath::grid(std::move(knots), std::move(vs));
    } else {
        throw InvalidInput("transport omega kind must be constant, polynomial or grid");
    }
    if (j.contains("dimension") && j["dimension"].get<std::size_t>() != job.omega.dim)
        throw InvalidInput("transport job: dimension does not match omega");
    std::string method = j.value("method", "picard");
    if (method == "picard") job.options.method = TransportMethod::picard;
    else if (method == "rk4") job.options.method = TransportMethod::rk4;
    else if (method == "both") job.options.method = TransportMethod::both;
    else throw InvalidInput("transport method must be picard, rk4 or both");
    job.options.steps = j.value("steps", std::size_t(1024));
    job.options.max_terms = j.value("terms", std::size_t(96));
    if (j.contains("tolerances")) {
        const Json& t = j["tolerances"];
        io::reject_unknown_keys(t, {"residual", "term_tail", "bound_slack"},
                                "transport tolerances");
        if (t.contains("residual")) job.options.residual_threshold = t["residual"].get<double>();
        if (t.contains("term_tail")) job.options.term_tail = t["term_tail"].get<double>();
        if (t.contains("bound_slack")) job.options.bound_slack = t["bound_slack"].get<double>();
    }
    std::string eq = j.value("equation", "forward");
    if (eq == "forward") job.inverse_equation = false;
    else if (eq == "inverse") job.inverse_equation = true;
    else throw InvalidInput("transport equation must be forward or inverse");
    return job;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write file: " + path);
    out << content;
}

} // namespace ncg
