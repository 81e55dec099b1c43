#include "dichotomy/json_io.hpp"

namespace dichotomy {

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
    require(j.is_array() && !j.empty() && j[0].is_array(), ErrorCode::InvalidInput,
            what + ": expected a nested array of numbers");
    const size_t rows = j.size(), cols = j[0].size();
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t i = 0; i < rows; ++i) {
        require(j[i].is_array() && j[i].size() == cols, ErrorCode::InvalidInput,
                what + ": ragged rows");
        for (size_t k = 0; k < cols; ++k) {
            require(j[i][k].is_number(), ErrorCode::InvalidInput, what + ": non-numeric entry");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
        }
    }
    require_finite(m, what.c_str());
    return m;
}

Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Subspace subspace_from_columns(const Json& j, int ambient_dim, const ToleranceConfig& tol) {
    require(j.is_array(), ErrorCode::InvalidInput, "subspace: expected a list of columns");
    Matrix cols(ambient_dim, static_cast<Eigen::Index>(j.size()));
    for (size_t c = 0; c < j.size(); ++c) {
        require(j[c].is_array() && static_cast<int>(j[c].size()) == ambient_dim,
                ErrorCode::InvalidInput, "subspace: each column must list n numbers");
        for (int i = 0; i < ambient_dim; ++i) cols(i, static_cast<Eigen::Index>(c)) = j[c][i];
    }
    return Subspace::span_of(cols, tol);
}

Json interval_to_json(const Interval& itv) {
    switch (itv.kind) {
        case Interval::Kind::Whole: return Json{{"kind", "whole"}};
        case Interval::Kind::HalfPlus: return Json{{"kind", "half_plus"}, {"a", itv.a}};
        case Interval::Kind::HalfMinus: return Json{{"kind", "half_minus"}, {"b", itv.b}};
        case Interval::Kind::Finite: return Json{{"kind", "finite"}, {"a", itv.a}, {"b", itv.b}};
    }
    return {};
}

Interval interval_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "whole") return Interval::whole();
    if (kind == "half_plus") return Interval::half_plus(j.at("a").get<long long>());
    if (kind == "half_minus") return Interval::half_minus(j.at("b").get<long long>());
    if (kind == "finite")
        return Interval::finite(j.at("a").get<long long>(), j.at("b").get<long long>());
    throw DichotomyError(ErrorCode::InvalidInput, "interval: unknown kind '" + kind + "'");
}

Json form_to_json(const Form& f) {
    if (f.kind == Form::Kind::A) return Json{{"form", "A"}, {"L", f.L}, {"alpha", f.alpha}};
    return Json{{"form", "B"}, {"M", f.M}, {"K", f.K}, {"alpha", f.alpha}};
}

Json judged(double value, double tolerance) {
    return Json{{"value", value}, {"tolerance", tolerance}};
}

Json tolerances_to_json(const ToleranceConfig& tol) {
    return Json{{"tol_rank", tol.tol_rank},
                {"tol_orth", tol.tol_orth},
                {"tol_residual", tol.tol_residual},
                {"tol_margin", tol.tol_margin}};
}

Json verify_report_to_json(const VerifyReport& rep) {
    return Json{{"pass", rep.pass},
                {"worst_margin", judged(rep.worst_margin, rep.margin_slack)},
                {"worst_pair", Json{{"m", rep.worst.m},
                                    {"k", rep.worst.k},
                                    {"inequality", rep.worst.inequality},
                                    {"margin", rep.worst.margin}}},
                {"pairs_checked", rep.pairs_checked},
                {"constants", form_to_json(rep.form)},
                {"window", Json{{"lo", rep.window_lo}, {"hi", rep.window_hi}}}};
}

namespace {

TailRule tail_from_json(const Json& j, const std::string& what) {
    if (j.is_null()) return TailRule::none();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "none") return TailRule::none();
    if (kind == "constant") return TailRule::constant(matrix_from_json(j.at("matrix"), what));
    if (kind == "periodic") {
        std::vector<Matrix> ms;
        for (const auto& m : j.at("matrices")) ms.push_back(matrix_from_json(m, what));
        return TailRule::periodic(std::move(ms));
    }
    throw DichotomyError(ErrorCode::InvalidInput, what + ": unknown tail kind '" + kind + "'");
}

}  // namespace

ProblemFile parse_problem(const Json& j) {
    require(j.is_object(), ErrorCode::InvalidInput, "problem: expected a JSON object");
    const int version = j.value("schema_version", kSchemaVersion);
    require(version == kSchemaVersion, ErrorCode::InvalidInput,
            "problem: unsupported schema_version " + std::to_string(version));
    ProblemFile out;
    if (j.contains("tolerances")) {
        const Json& t = j.at("tolerances");
        out.tol.tol_rank = t.value("tol_rank", out.tol.tol_rank);
        out.tol.tol_orth = t.value("tol_orth", out.tol.tol_orth);
        out.tol.tol_residual = t.value("tol_residual", out.tol.tol_residual);
        out.tol.tol_margin = t.value("tol_margin", out.tol.tol_margin);
        out.tol.validate();
    }

    const int n = j.at("n").get<int>();
    Interval itv = interval_from_json(j.at("interval"));

    const Json& mats = j.at("matrices");
    std::map<long long, Matrix> window;
    if (mats.contains("explicit"))
        for (const auto& [key, val] : mats.at("explicit").items())
            window[std::stoll(key)] = matrix_from_json(val, "matrices.explicit[" + key + "]");
    TailRule left = tail_from_json(mats.value("left_tail", Json()), "matrices.left_tail");
    TailRule right = tail_from_json(mats.value("right_tail", Json()), "matrices.right_tail");
    std::optional<double> bound;
    if (j.contains("norm_bound")) bound = j.at("norm_bound").get<double>();
    out.seq = std::make_shared<CoefficientSequence>(n, itv, std::move(window), std::move(left),
                                                    std::move(right), bound);

    if (j.contains("projection")) {
        const Json& p = j.at("projection");
        std::map<long long, Matrix> pw;
        if (p.contains("explicit"))
            for (const auto& [key, val] : p.at("explicit").items())
                pw[std::stoll(key)] = matrix_from_json(val, "projection.explicit[" + key + "]");
        std::optional<Matrix> pl, pr;
        if (p.contains("left_tail")) pl = matrix_from_json(p.at("left_tail"), "projection.left_tail");
        if (p.contains("right_tail"))
            pr = matrix_from_json(p.at("right_tail"), "projection.right_tail");
        out.family = ProjectionFamily(itv, std::move(pw), std::move(pl), std::move(pr));
    }

    if (j.contains("constants")) {
        const Json& c = j.at("constants");
        const std::string form = c.at("form").get<std::string>();
        if (form == "A")
            out.constants = Form::formA(c.at("L").get<double>(), c.at("alpha").get<double>());
        else if (form == "B")
            out.constants = Form::formB(c.at("M").get<double>(), c.at("K").get<double>(),
                                        c.at("alpha").get<double>());
        else
            throw DichotomyError(ErrorCode::InvalidInput, "constants: unknown form '" + form + "'");
    }
    return out;
}

}  // namespace dichotomy
