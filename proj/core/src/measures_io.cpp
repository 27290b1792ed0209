#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "basslv/measures.hpp"
#include "basslv/numeric/format.hpp"

#include <json.hpp>

namespace basslv {

using nlohmann::json;

namespace {

json simple_to_json(const SimpleDist& s) {
    json j;
    if (const auto* u = std::get_if<UniformParams>(&s.params())) {
        j["type"] = "uniform";
        j["lower"] = u->lo;
        j["upper"] = u->hi;
    } else if (const auto* t = std::get_if<TruncNormalParams>(&s.params())) {
        j["type"] = "trunc_normal";
        j["mean"] = t->mean;
        j["stdev"] = t->stdev;
        j["lower"] = t->lo;
        j["upper"] = t->hi;
    } else if (const auto* n = std::get_if<NormalParams>(&s.params())) {
        j["type"] = "normal";
        j["mean"] = n->mean;
        j["stdev"] = n->stdev;
    } else if (const auto* l = std::get_if<LogisticParams>(&s.params())) {
        j["type"] = "logistic";
        j["location"] = l->location;
        j["scale"] = l->scale;
    } else {
        j["type"] = "point_mass";
        j["location"] = std::get<PointMassParams>(s.params()).location;
    }
    return j;
}

json measure_to_json(const Measure& m) {
    if (m.is_discrete()) {
        const DiscreteMeasure& d = m.discrete();
        return json{{"type", "discrete"}, {"atoms", d.atoms()}, {"weights", d.weights()}};
    }
    const AnalyticDistribution& a = m.analytic();
    if (a.is_simple()) return simple_to_json(a.components()[0]);
    json comps = json::array();
    for (const auto& c : a.components()) comps.push_back(simple_to_json(c));
    return json{{"type", "mixture"}, {"components", comps}, {"weights", a.component_weights()}};
}

AnalyticDistribution simple_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "uniform")
        return AnalyticDistribution::uniform(j.at("lower").get<double>(),
                                             j.at("upper").get<double>());
    if (type == "trunc_normal")
        return AnalyticDistribution::trunc_normal(j.at("mean").get<double>(),
                                                  j.at("stdev").get<double>(),
                                                  j.at("lower").get<double>(),
                                                  j.at("upper").get<double>());
    if (type == "normal")
        return AnalyticDistribution::normal(j.at("mean").get<double>(),
                                            j.at("stdev").get<double>());
    if (type == "logistic")
        return AnalyticDistribution::logistic(j.at("location").get<double>(),
                                              j.at("scale").get<double>());
    if (type == "point_mass")
        return AnalyticDistribution::point_mass(j.at("location").get<double>());
    throw std::invalid_argument("unknown distribution type: " + type);
}

Measure measure_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "discrete") {
        return Measure(DiscreteMeasure(j.at("atoms").get<std::vector<double>>(),
                                       j.at("weights").get<std::vector<double>>()));
    }
    if (type == "mixture") {
        std::vector<AnalyticDistribution> comps;
        for (const auto& c : j.at("components")) comps.push_back(simple_from_json(c));
        return Measure(AnalyticDistribution::mixture(std::move(comps),
                                                     j.at("weights").get<std::vector<double>>()));
    }
    return Measure(simple_from_json(j));
}

}  // namespace

std::string to_json_string(const Measure& m, int indent) {
    return measure_to_json(m).dump(indent);
}

Measure measure_from_json_string(const std::string& text) {
    return measure_from_json(json::parse(text));
}

void write_csv(const DiscreteMeasure& m, std::ostream& out) {
    out << "atom,weight\n";
    for (std::size_t j = 0; j < m.size(); ++j)
        out << format_double(m.atoms()[j]) << ',' << format_double(m.weights()[j]) << '\n';
}

DiscreteMeasure discrete_from_csv(std::istream& in) {
    std::vector<double> atoms, weights;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1 && line.find("atom") != std::string::npos) continue;  // header
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("discrete_from_csv: missing comma on line " +
                                        std::to_string(lineno));
        try {
            atoms.push_back(std::stod(line.substr(0, comma)));
            weights.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw std::invalid_argument("discrete_from_csv: bad number on line " +
                                        std::to_string(lineno));
        }
    }
    return DiscreteMeasure(std::move(atoms), std::move(weights));
}

}  // namespace basslv
