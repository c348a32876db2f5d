#include <cctype>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <set>
#include <stdexcept>

#include "reserveflow/lp.hpp"

namespace reserveflow {

int LpProblem::add_variable(std::string name, double c, double lo, double hi) {
    cost.push_back(c);
    lower.push_back(lo);
    upper.push_back(hi);
    var_names.push_back(std::move(name));
    return n_vars() - 1;
}

int LpProblem::add_eq(std::string name, std::vector<int> index, std::vector<double> value, double rhs) {
    eq_rows.push_back({std::move(name), std::move(index), std::move(value), rhs});
    return n_eq() - 1;
}

int LpProblem::add_ub(std::string name, std::vector<int> index, std::vector<double> value, double rhs) {
    ub_rows.push_back({std::move(name), std::move(index), std::move(value), rhs});
    return n_ub() - 1;
}

double LpProblem::objective(const std::vector<double>& x) const {
    double v = 0.0;
    for (int j = 0; j < n_vars(); ++j) v += cost[j] * x[j];
    return v;
}

void LpProblem::check() const {
    const int n = n_vars();
    if (lower.size() != cost.size() || upper.size() != cost.size() || var_names.size() != cost.size())
        throw std::invalid_argument("LpProblem: variable arrays differ in length");
    for (int j = 0; j < n; ++j) {
        if (!std::isfinite(cost[j])) throw std::invalid_argument("LpProblem: non-finite cost on " + var_names[j]);
        if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] == kInf || upper[j] == -kInf)
            throw std::invalid_argument("LpProblem: bad bound on " + var_names[j]);
    }
    auto rows = [n](const std::vector<LpRow>& rs) {
        for (const auto& r : rs) {
            if (r.index.size() != r.value.size()) throw std::invalid_argument("LpProblem: row " + r.name + " malformed");
            if (!std::isfinite(r.rhs)) throw std::invalid_argument("LpProblem: row " + r.name + " has non-finite rhs");
            for (std::size_t t = 0; t < r.index.size(); ++t) {
                if (r.index[t] < 0 || r.index[t] >= n) throw std::invalid_argument("LpProblem: row " + r.name + " index out of range");
                if (!std::isfinite(r.value[t])) throw std::invalid_argument("LpProblem: row " + r.name + " non-finite coefficient");
            }
        }
    };
    rows(eq_rows);
    rows(ub_rows);
}

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "Optimal";
        case LpStatus::Infeasible: return "Infeasible";
        case LpStatus::Unbounded: return "Unbounded";
    }
    return "?";
}

SolverOptions default_solver_options() {
    SolverOptions o;
    if (const char* env = std::getenv("RESERVEFLOW_SOLVER_TOL")) {
        char* end = nullptr;
        double v = std::strtod(env, &end);
        if (end != env && v > 0 && v < 1e-2) o.tolerance = v;
    }
    return o;
}

namespace {

std::string lp_name(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.') out += ch;
        else if (ch == '+') out += "_fwd";  // flow+ / flow- must not collide
        else if (ch == '-') out += "_rev";
        else out += '_';
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "v_" + out;
    return out;
}

// Sanitised names, with a numeric suffix on anything that still collides.
std::vector<std::string> unique_names(const std::vector<std::string>& raw, std::set<std::string>& taken) {
    std::vector<std::string> out;
    out.reserve(raw.size());
    for (const auto& r : raw) {
        auto n = lp_name(r);
        for (int i = 2; taken.count(n); ++i) n = lp_name(r) + "_" + std::to_string(i);
        taken.insert(n);
        out.push_back(n);
    }
    return out;
}

void write_terms(std::ostream& os, const std::vector<int>& idx, const std::vector<double>& val,
                 const std::vector<std::string>& names) {
    bool first = true;
    for (std::size_t t = 0; t < idx.size(); ++t) {
        double a = val[t];
        if (a == 0.0) continue;
        os << (a < 0 ? " - " : (first ? " " : " + ")) << std::abs(a) << " " << names[idx[t]];
        first = false;
    }
    if (first) os << " 0 " << (names.empty() ? "x" : names[0]);
}

}  // namespace

void write_lp_text(const LpProblem& p, std::ostream& os) {
    auto old = os.precision(17);
    std::set<std::string> taken{"obj"};
    const auto vars = unique_names(p.var_names, taken);
    std::vector<std::string> raw_rows;
    for (const auto& r : p.eq_rows) raw_rows.push_back(r.name);
    for (const auto& r : p.ub_rows) raw_rows.push_back(r.name);
    const auto rows = unique_names(raw_rows, taken);
    std::size_t next_row = 0;
    os << "Minimize\n obj:";
    std::vector<int> all(p.n_vars());
    for (int j = 0; j < p.n_vars(); ++j) all[j] = j;
    write_terms(os, all, p.cost, vars);
    os << "\nSubject To\n";
    for (const auto& r : p.eq_rows) {
        os << " " << rows[next_row++] << ":";
        write_terms(os, r.index, r.value, vars);
        os << " = " << r.rhs + 0.0 << "\n";
    }
    for (const auto& r : p.ub_rows) {
        os << " " << rows[next_row++] << ":";
        write_terms(os, r.index, r.value, vars);
        os << " <= " << r.rhs + 0.0 << "\n";
    }
    os << "Bounds\n";
    for (int j = 0; j < p.n_vars(); ++j) {
        const auto& n = vars[j];
        double lo = p.lower[j], hi = p.upper[j];
        if (lo == -kInf && hi == kInf) os << " " << n << " free\n";
        else if (lo == hi) os << " " << n << " = " << lo << "\n";
        else {
            os << " ";
            if (lo == -kInf) os << "-inf"; else os << lo;
            os << " <= " << n << " <= ";
            if (hi == kInf) os << "+inf"; else os << hi;
            os << "\n";
        }
    }
    os << "End\n";
    os.precision(old);
}

}  // namespace reserveflow
