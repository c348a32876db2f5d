#include <cctype>
#include <sstream>

#include "reserveflow/errors.hpp"
#include "reserveflow/io.hpp"

namespace reserveflow {

namespace {

std::string strip_comments(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool comment = false;
    for (char c : text) {
        if (c == '%') comment = true;
        if (c == '\n') comment = false;
        if (!comment) out += c;
    }
    return out;
}

// Rows of "mpc.<name> = [ ... ];", split on ';' or newline.
std::vector<std::vector<double>> matrix(const std::string& text, const std::string& name) {
    const std::string key = "mpc." + name;
    std::size_t at = 0;
    for (;;) {
        at = text.find(key, at);
        if (at == std::string::npos) return {};
        std::size_t after = at + key.size();
        // reject prefixes such as mpc.gencost when looking for mpc.gen
        if (after < text.size() && (std::isalnum(static_cast<unsigned char>(text[after])) || text[after] == '_')) {
            at = after;
            continue;
        }
        break;
    }
    const std::size_t open = text.find('[', at), close = text.find(']', open);
    if (open == std::string::npos || close == std::string::npos) throw ParseError("unterminated matrix " + key, 0, 0);
    std::vector<std::vector<double>> rows;
    std::string body = text.substr(open + 1, close - open - 1);
    for (char& c : body)
        if (c == ';') c = '\n';
    std::istringstream lines(body);
    std::string ln;
    while (std::getline(lines, ln)) {
        for (char& c : ln)
            if (c == ',' || c == '\t' || c == '\r') c = ' ';
        std::istringstream ss(ln);
        std::vector<double> row;
        std::string tok;
        while (ss >> tok) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ParseError("bad number '" + tok + "' in " + key, 0, 0);
            }
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

MatpowerData parse_matpower(const std::string& raw) {
    const std::string text = strip_comments(raw);
    MatpowerData d;
    if (auto at = text.find("mpc.baseMVA"); at != std::string::npos) {
        auto eq = text.find('=', at);
        d.base_mva = std::stod(text.substr(eq + 1));
    }
    d.bus = matrix(text, "bus");
    d.gen = matrix(text, "gen");
    d.branch = matrix(text, "branch");
    d.gencost = matrix(text, "gencost");
    if (d.bus.empty() || d.branch.empty()) throw SchemaError("MATPOWER file lacks bus or branch data");
    return d;
}

MatpowerData read_matpower(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw MissingData("network file not found: " + path.string());
    return parse_matpower(read_file(path));
}

}  // namespace reserveflow
