#include <cctype>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "reserveflow/errors.hpp"
#include "reserveflow/io.hpp"

namespace reserveflow {

using ojson = nlohmann::ordered_json;

namespace {

// Byte offsets of every value, keyed by JSON pointer. Built by a second SAX pass
// over an iterator that counts how far the lexer has read.
struct CountingIt {
    using iterator_category = std::input_iterator_tag;
    using value_type = char;
    using difference_type = std::ptrdiff_t;
    using pointer = const char*;
    using reference = const char&;
    const char* p = nullptr;
    std::size_t* counter = nullptr;
    reference operator*() const { return *p; }
    CountingIt& operator++() {
        ++p;
        ++*counter;
        return *this;
    }
    CountingIt operator++(int) {
        auto t = *this;
        ++*this;
        return t;
    }
    bool operator==(const CountingIt& o) const { return p == o.p; }
    bool operator!=(const CountingIt& o) const { return p != o.p; }
};

struct PositionSax : nlohmann::json_sax<ojson> {
    struct Frame {
        bool object = false;
        std::string key;
        int index = 0;
    };
    std::vector<Frame> stack;
    std::map<std::string, std::size_t> where;
    const std::size_t* counter = nullptr;

    static std::string escape(const std::string& s) {
        std::string o;
        for (char c : s) {
            if (c == '~') o += "~0";
            else if (c == '/') o += "~1";
            else o += c;
        }
        return o;
    }
    std::string path() const {
        std::string p;
        for (const auto& f : stack) p += "/" + (f.object ? escape(f.key) : std::to_string(f.index));
        return p;
    }
    bool value() {
        where[path()] = *counter;
        if (!stack.empty() && !stack.back().object) ++stack.back().index;
        return true;
    }
    bool null() override { return value(); }
    bool boolean(bool) override { return value(); }
    bool number_integer(number_integer_t) override { return value(); }
    bool number_unsigned(number_unsigned_t) override { return value(); }
    bool number_float(number_float_t, const string_t&) override { return value(); }
    bool string(string_t&) override { return value(); }
    bool binary(binary_t&) override { return value(); }
    bool start_object(std::size_t) override {
        where[path()] = *counter;
        stack.push_back({true, "", 0});
        return true;
    }
    bool key(string_t& k) override {
        stack.back().key = k;
        return true;
    }
    bool end_object() override {
        stack.pop_back();
        if (!stack.empty() && !stack.back().object) ++stack.back().index;
        return true;
    }
    bool start_array(std::size_t) override {
        where[path()] = *counter;
        stack.push_back({false, "", 0});
        return true;
    }
    bool end_array() override { return end_object(); }
    bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override { return false; }
};

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

class Reader {
public:
    Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {
        try {
            doc_ = ojson::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            auto [l, c] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
            throw ParseError(source_ + ":" + std::to_string(l) + ":" + std::to_string(c) + ": malformed JSON", l, c);
        }
        std::size_t count = 0;
        PositionSax sax;
        sax.counter = &count;
        CountingIt b{text.data(), &count}, e{text.data() + text.size(), &count};
        ojson::sax_parse(b, e, &sax);
        where_ = std::move(sax.where);
    }

    const ojson& doc() const { return doc_; }

    [[noreturn]] void type_error(const std::string& ptr, const std::string& want) const {
        auto it = where_.find(ptr);
        std::size_t byte = it == where_.end() ? 0 : it->second;
        // The lexer has read one character past the value; back up to its start.
        const auto& v = doc_.at(ojson::json_pointer(ptr));
        std::size_t len = v.dump().size();
        byte = byte > len ? byte - len : 0;
        while (byte < text_.size() && std::isspace(static_cast<unsigned char>(text_[byte]))) ++byte;
        auto [l, c] = line_col(text_, byte);
        throw ParseError(source_ + ":" + std::to_string(l) + ":" + std::to_string(c) + ": " + ptr + " must be " + want,
                         l, c);
    }
    [[noreturn]] void schema(const std::string& ptr, const std::string& msg) const {
        throw SchemaError(source_ + ": " + (ptr.empty() ? "/" : ptr) + ": " + msg);
    }

    // Object with exactly the given fields; optional ones may be absent.
    void fields(const std::string& ptr, const ojson& o, std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional = {}) const {
        if (!o.is_object()) type_error(ptr, "an object");
        std::set<std::string> known;
        for (auto* k : required) {
            known.insert(k);
            if (!o.contains(k)) schema(ptr, std::string("missing field \"") + k + "\"");
        }
        for (auto* k : optional) known.insert(k);
        for (auto it = o.begin(); it != o.end(); ++it)
            if (!known.count(it.key())) schema(ptr + "/" + it.key(), "unknown field");
    }
    double number(const std::string& ptr, const ojson& v) const {
        if (!v.is_number()) type_error(ptr, "a number");
        return v.get<double>();
    }
    int integer(const std::string& ptr, const ojson& v) const {
        if (!v.is_number_integer()) type_error(ptr, "an integer");
        return v.get<int>();
    }
    std::string string(const std::string& ptr, const ojson& v) const {
        if (!v.is_string()) type_error(ptr, "a string");
        return v.get<std::string>();
    }
    const ojson& array(const std::string& ptr, const ojson& v) const {
        if (!v.is_array()) type_error(ptr, "an array");
        return v;
    }

private:
    const std::string& text_;
    std::string source_;
    ojson doc_;
    std::map<std::string, std::size_t> where_;
};

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

MarketCase parse_case(const std::filesystem::path& path) { return parse_case_text(read_file(path), path.string()); }

MarketCase parse_case_text(const std::string& text, const std::string& source) {
    Reader rd(text, source);
    const auto& doc = rd.doc();
    rd.fields("", doc, {"schema_version", "name", "slack_bus", "buses", "lines", "generators", "loads", "scenarios"});
    const int version = rd.integer("/schema_version", doc["schema_version"]);
    if (version != kCaseSchemaVersion)
        rd.schema("/schema_version", "unsupported version " + std::to_string(version) + " (expected " +
                                         std::to_string(kCaseSchemaVersion) + ")");

    MarketCase mc;
    mc.name = rd.string("/name", doc["name"]);

    std::map<int, int> bus_at, line_at;
    std::map<std::string, int> gen_at, load_at;
    auto lookup = [&](const std::map<int, int>& m, int id, const std::string& ptr, const char* what) {
        auto it = m.find(id);
        if (it == m.end()) rd.schema(ptr, std::string("unknown ") + what + " id " + std::to_string(id));
        return it->second;
    };

    const auto& buses = rd.array("/buses", doc["buses"]);
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const std::string p = "/buses/" + std::to_string(i);
        rd.fields(p, buses[i], {"id", "name"});
        Bus b{rd.integer(p + "/id", buses[i]["id"]), rd.string(p + "/name", buses[i]["name"])};
        if (!bus_at.emplace(b.id, int(i)).second) rd.schema(p + "/id", "duplicate bus id");
        mc.buses.push_back(b);
    }
    mc.slack_bus = lookup(bus_at, rd.integer("/slack_bus", doc["slack_bus"]), "/slack_bus", "bus");

    const auto& lines = rd.array("/lines", doc["lines"]);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string p = "/lines/" + std::to_string(i);
        const auto& o = lines[i];
        rd.fields(p, o, {"id", "from", "to", "reactance", "capacity"}, {"circuits"});
        Line ln;
        ln.id = rd.integer(p + "/id", o["id"]);
        ln.from_bus = lookup(bus_at, rd.integer(p + "/from", o["from"]), p + "/from", "bus");
        ln.to_bus = lookup(bus_at, rd.integer(p + "/to", o["to"]), p + "/to", "bus");
        ln.reactance = rd.number(p + "/reactance", o["reactance"]);
        ln.capacity = rd.number(p + "/capacity", o["capacity"]);
        ln.parallel_count = o.contains("circuits") ? rd.integer(p + "/circuits", o["circuits"]) : 1;
        if (!line_at.emplace(ln.id, int(i)).second) rd.schema(p + "/id", "duplicate line id");
        mc.lines.push_back(ln);
    }

    const auto& gens = rd.array("/generators", doc["generators"]);
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const std::string p = "/generators/" + std::to_string(i);
        const auto& o = gens[i];
        rd.fields(p, o, {"id", "name", "bus", "g_min", "g_max", "ru_max", "rd_max", "c_energy", "c_ru", "c_rd"});
        Generator g;
        g.id = rd.integer(p + "/id", o["id"]);
        g.name = rd.string(p + "/name", o["name"]);
        g.bus = lookup(bus_at, rd.integer(p + "/bus", o["bus"]), p + "/bus", "bus");
        g.g_min = rd.number(p + "/g_min", o["g_min"]);
        g.g_max = rd.number(p + "/g_max", o["g_max"]);
        g.ru_max = rd.number(p + "/ru_max", o["ru_max"]);
        g.rd_max = rd.number(p + "/rd_max", o["rd_max"]);
        g.c_energy = rd.number(p + "/c_energy", o["c_energy"]);
        g.c_ru = rd.number(p + "/c_ru", o["c_ru"]);
        g.c_rd = rd.number(p + "/c_rd", o["c_rd"]);
        if (!gen_at.emplace(g.name, int(i)).second) rd.schema(p + "/name", "duplicate generator name");
        mc.generators.push_back(g);
    }

    const auto& loads = rd.array("/loads", doc["loads"]);
    for (std::size_t i = 0; i < loads.size(); ++i) {
        const std::string p = "/loads/" + std::to_string(i);
        const auto& o = loads[i];
        rd.fields(p, o, {"id", "name", "bus", "demand", "c_shed"});
        Load d;
        d.id = rd.integer(p + "/id", o["id"]);
        d.name = rd.string(p + "/name", o["name"]);
        d.bus = lookup(bus_at, rd.integer(p + "/bus", o["bus"]), p + "/bus", "bus");
        d.base_demand = rd.number(p + "/demand", o["demand"]);
        d.c_shed = rd.number(p + "/c_shed", o["c_shed"]);
        if (!load_at.emplace(d.name, int(i)).second) rd.schema(p + "/name", "duplicate load name");
        mc.loads.push_back(d);
    }

    // name -> value maps; gens/loads missing from a map get `fill`, or are an error when fill is empty.
    auto by_name = [&](const std::string& p, const ojson& o, const std::map<std::string, int>& at, int n,
                       std::optional<double> fill) {
        if (!o.is_object()) rd.type_error(p, "an object keyed by name");
        std::vector<double> out(n, fill.value_or(0.0));
        std::vector<char> seen(n, 0);
        for (auto it = o.begin(); it != o.end(); ++it) {
            auto f = at.find(it.key());
            if (f == at.end()) rd.schema(p + "/" + it.key(), "unknown name");
            out[f->second] = rd.number(p + "/" + it.key(), it.value());
            seen[f->second] = 1;
        }
        if (!fill)
            for (const auto& [name, idx] : at)
                if (!seen[idx]) rd.schema(p, "missing entry for " + name);
        return out;
    };

    const auto& scen = rd.array("/scenarios", doc["scenarios"]);
    for (std::size_t i = 0; i < scen.size(); ++i) {
        const std::string p = "/scenarios/" + std::to_string(i);
        const auto& o = scen[i];
        rd.fields(p, o, {"id", "name", "probability", "c_up", "c_down"}, {"exceed_rate", "outages", "fluctuation"});
        Scenario s;
        s.id = rd.integer(p + "/id", o["id"]);
        s.name = rd.string(p + "/name", o["name"]);
        s.probability = rd.number(p + "/probability", o["probability"]);
        s.exceed_rate = o.contains("exceed_rate") ? rd.number(p + "/exceed_rate", o["exceed_rate"]) : 1.0;
        if (o.contains("outages")) {
            const auto& outs = rd.array(p + "/outages", o["outages"]);
            for (std::size_t t = 0; t < outs.size(); ++t) {
                const std::string q = p + "/outages/" + std::to_string(t);
                rd.fields(q, outs[t], {"line"}, {"circuits"});
                LineOutage lo;
                lo.line = lookup(line_at, rd.integer(q + "/line", outs[t]["line"]), q + "/line", "line");
                lo.circuits = outs[t].contains("circuits") ? rd.integer(q + "/circuits", outs[t]["circuits"]) : 1;
                s.outages.push_back(lo);
            }
        }
        s.load_fluctuation = o.contains("fluctuation")
                                 ? by_name(p + "/fluctuation", o["fluctuation"], load_at, mc.n_loads(), 0.0)
                                 : std::vector<double>(mc.n_loads(), 0.0);
        s.c_redispatch_up = by_name(p + "/c_up", o["c_up"], gen_at, mc.n_gens(), std::nullopt);
        s.c_redispatch_down = by_name(p + "/c_down", o["c_down"], gen_at, mc.n_gens(), std::nullopt);
        mc.scenarios.push_back(std::move(s));
    }

    auto rep = validate_case(mc);
    if (!rep.ok()) throw ValidationError(source + ": invalid case\n" + rep.summary());
    return mc;
}

std::string case_to_json(const MarketCase& mc) {
    ojson doc;
    doc["schema_version"] = kCaseSchemaVersion;
    doc["name"] = mc.name;
    doc["slack_bus"] = mc.buses.at(mc.slack_bus).id;
    auto bus_id = [&](int b) { return mc.buses.at(b).id; };
    doc["buses"] = ojson::array();
    for (const auto& b : mc.buses) doc["buses"].push_back({{"id", b.id}, {"name", b.name}});
    doc["lines"] = ojson::array();
    for (const auto& l : mc.lines) {
        ojson o = {{"id", l.id},           {"from", bus_id(l.from_bus)}, {"to", bus_id(l.to_bus)},
                   {"reactance", l.reactance}, {"capacity", l.capacity}};
        if (l.parallel_count != 1) o["circuits"] = l.parallel_count;
        doc["lines"].push_back(o);
    }
    doc["generators"] = ojson::array();
    for (const auto& g : mc.generators)
        doc["generators"].push_back({{"id", g.id},
                                     {"name", g.name},
                                     {"bus", bus_id(g.bus)},
                                     {"g_min", g.g_min},
                                     {"g_max", g.g_max},
                                     {"ru_max", g.ru_max},
                                     {"rd_max", g.rd_max},
                                     {"c_energy", g.c_energy},
                                     {"c_ru", g.c_ru},
                                     {"c_rd", g.c_rd}});
    doc["loads"] = ojson::array();
    for (const auto& d : mc.loads)
        doc["loads"].push_back(
            {{"id", d.id}, {"name", d.name}, {"bus", bus_id(d.bus)}, {"demand", d.base_demand}, {"c_shed", d.c_shed}});
    doc["scenarios"] = ojson::array();
    for (const auto& s : mc.scenarios) {
        ojson o = {{"id", s.id}, {"name", s.name}, {"probability", s.probability}, {"exceed_rate", s.exceed_rate}};
        if (!s.outages.empty()) {
            o["outages"] = ojson::array();
            for (const auto& out : s.outages) {
                ojson e = {{"line", mc.lines.at(out.line).id}};
                if (out.circuits != 1) e["circuits"] = out.circuits;
                o["outages"].push_back(e);
            }
        }
        ojson fl = ojson::object();
        for (int l = 0; l < mc.n_loads(); ++l)
            if (s.load_fluctuation[l] != 0.0) fl[mc.loads[l].name] = s.load_fluctuation[l];
        if (!fl.empty()) o["fluctuation"] = fl;
        ojson up = ojson::object(), dn = ojson::object();
        for (int j = 0; j < mc.n_gens(); ++j) {
            up[mc.generators[j].name] = s.c_redispatch_up[j];
            dn[mc.generators[j].name] = s.c_redispatch_down[j];
        }
        o["c_up"] = up;
        o["c_down"] = dn;
        doc["scenarios"].push_back(o);
    }
    return doc.dump(2) + "\n";
}

void write_case(const MarketCase& mc, const std::filesystem::path& path) { write_file(path, case_to_json(mc)); }

}  // namespace reserveflow
