#include "seqpred/model_io.hpp"

#include <algorithm>
#include <fstream>

namespace seqpred {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& context) {
    if (!obj.is_object()) throw InputError(context + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw InputError(context + ": unknown key \"" + it.key() + "\"");
    }
}

namespace {

Eigen::VectorXd vector_from_json(const json& j, const std::string& context) {
    if (!j.is_array()) throw InputError(context + ": expected an array of numbers");
    Eigen::VectorXd v(static_cast<int>(j.size()));
    for (int i = 0; i < v.size(); ++i) v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

} // namespace

MeasurePtr measure_from_json(const json& j, Alphabet a) {
    if (!j.is_object() || !j.contains("family")) throw InputError("measure: missing \"family\"");
    const std::string family = j.at("family").get<std::string>();

    if (family == "uniform") {
        reject_unknown_keys(j, {"family"}, "uniform measure");
        return std::make_shared<UniformIID>(a);
    }
    if (family == "kt") {
        reject_unknown_keys(j, {"family"}, "kt measure");
        return std::make_shared<KTEstimator>(a);
    }
    if (family == "iid") {
        reject_unknown_keys(j, {"family", "theta"}, "iid measure");
        return std::make_shared<IIDCategorical>(a, vector_from_json(j.at("theta"), "iid theta"));
    }
    if (family == "markov") {
        reject_unknown_keys(j, {"family", "initial", "transition"}, "markov measure");
        const json& rows = j.at("transition");
        Eigen::MatrixXd t(a.size(), a.size());
        if (!rows.is_array() || static_cast<int>(rows.size()) != a.size())
            throw InputError("markov transition: expected " + std::to_string(a.size()) + " rows");
        for (int r = 0; r < a.size(); ++r)
            t.row(r) = vector_from_json(rows.at(static_cast<std::size_t>(r)), "markov transition row").transpose();
        return std::make_shared<MarkovChain>(a, vector_from_json(j.at("initial"), "markov initial"), t);
    }
    if (family == "dirac") {
        reject_unknown_keys(j, {"family", "head", "period"}, "dirac measure");
        Seq head = j.contains("head") ? seq_from_string(j.at("head").get<std::string>()) : Seq{};
        return std::make_shared<DiracMeasure>(a, head, seq_from_string(j.at("period").get<std::string>()));
    }
    if (family == "mixture") {
        reject_unknown_keys(j, {"family", "components"}, "mixture measure");
        std::vector<FiniteMixture::Component> comps;
        for (const json& c : j.at("components")) {
            reject_unknown_keys(c, {"weight", "measure"}, "mixture component");
            comps.push_back({c.at("weight").get<double>(), measure_from_json(c.at("measure"), a)});
        }
        return std::make_shared<FiniteMixture>(a, std::move(comps));
    }
    if (family == "mix_uniform") {
        reject_unknown_keys(j, {"family", "base"}, "mix_uniform measure");
        return mix_with_uniform(measure_from_json(j.at("base"), a));
    }
    throw InputError("measure: unknown family \"" + family + "\"");
}

json measure_to_json(const ProcessMeasure& m) {
    if (dynamic_cast<const UniformIID*>(&m)) return json{{"family", "uniform"}};
    if (dynamic_cast<const KTEstimator*>(&m)) return json{{"family", "kt"}};
    if (auto* iid = dynamic_cast<const IIDCategorical*>(&m))
        return json{{"family", "iid"}, {"theta", vector_to_json(iid->theta())}};
    if (auto* mk = dynamic_cast<const MarkovChain*>(&m)) {
        json rows = json::array();
        for (int r = 0; r < mk->alphabet().size(); ++r) rows.push_back(vector_to_json(mk->transition().row(r)));
        return json{{"family", "markov"}, {"initial", vector_to_json(mk->initial())}, {"transition", rows}};
    }
    if (auto* d = dynamic_cast<const DiracMeasure*>(&m))
        return json{{"family", "dirac"}, {"head", seq_to_string(d->head())}, {"period", seq_to_string(d->period())}};
    if (auto* mix = dynamic_cast<const FiniteMixture*>(&m)) {
        json comps = json::array();
        for (const auto& c : mix->components())
            comps.push_back(json{{"weight", c.weight}, {"measure", measure_to_json(*c.measure)}});
        return json{{"family", "mixture"}, {"components", comps}};
    }
    throw InputError("measure_to_json: family of \"" + m.name() + "\" has no document form");
}

ModelClass class_from_json(const json& j) {
    reject_unknown_keys(j, {"alphabet", "members", "weights"}, "model class");
    if (!j.contains("alphabet") || !j.contains("members")) throw InputError("model class: needs alphabet and members");
    Alphabet a(j.at("alphabet").get<int>());
    ModelClass c{a, {}, {}};
    for (const json& m : j.at("members")) c.members.push_back(measure_from_json(m, a));
    if (c.members.empty()) throw InputError("model class: members must be nonempty");
    if (j.contains("weights")) {
        for (const json& w : j.at("weights")) c.weights.push_back(w.get<double>());
        if (c.weights.size() != c.members.size())
            throw InputError("model class: weights length does not match members");
        for (double w : c.weights)
            if (!(w > 0.0)) throw InputError("model class: weights must be positive");
    }
    return c;
}

json class_to_json(const ModelClass& c) {
    json members = json::array();
    for (const auto& m : c.members) members.push_back(measure_to_json(*m));
    json out{{"alphabet", c.alphabet.size()}, {"members", members}};
    if (!c.weights.empty()) {
        json w = json::array();
        for (double x : c.weights) w.push_back(x);
        out["weights"] = w;
    }
    return out;
}

ModelClass load_class_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open model class file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("bad JSON in " + path + ": " + e.what());
    }
    return class_from_json(j);
}

void save_class_file(const ModelClass& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write model class file: " + path);
    out << class_to_json(c).dump(2) << "\n";
}

} // namespace seqpred
