#include "agmmn/checkpoint.hpp"

#include "agmmn/io.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

namespace agmmn {

namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "agmmn-checkpoint";

json architecture_json(const MlpArchitecture& a) {
    return json{{"input_dim", a.input_dim},
                {"hidden", a.hidden_sizes},
                {"output_dim", a.output_dim},
                {"hidden_activation", "relu"},
                {"output_activation", "sigmoid"}};
}

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("checkpoint: " + what);
}

}  // namespace

std::string checkpoint_to_text(const Checkpoint& c) {
    require(c.model.all_finite(), "model has non-finite parameters");
    json layers = json::array();
    for (const auto& layer : c.model.layers()) {
        json rows = json::array();
        for (Index r = 0; r < layer.weights.rows(); ++r) {
            json row = json::array();
            for (Index k = 0; k < layer.weights.cols(); ++k) row.push_back(layer.weights(r, k));
            rows.push_back(std::move(row));
        }
        json bias = json::array();
        for (Index r = 0; r < layer.bias.size(); ++r) bias.push_back(layer.bias(r));
        layers.push_back(json{{"weights", std::move(rows)}, {"bias", std::move(bias)}});
    }
    json meta{{"final_bandwidths", c.meta.final_bandwidths},
              {"epochs", c.meta.epochs},
              {"stop_reason", c.meta.stop_reason},
              {"seed", c.meta.seed},
              {"seeds", c.meta.seeds}};
    json doc{{"format", kFormatTag},
             {"version", Checkpoint::kFormatVersion},
             {"architecture", architecture_json(c.model.architecture())},
             {"layers", std::move(layers)},
             {"metadata", std::move(meta)}};
    return doc.dump(1) + "\n";
}

Checkpoint checkpoint_from_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("checkpoint: not valid JSON: ") + e.what());
    }
    require(doc.is_object() && doc.value("format", "") == kFormatTag, "unknown format");
    require(doc.contains("version") && doc["version"].is_number_integer(), "missing version");
    const int version = doc["version"].get<int>();
    require(version == Checkpoint::kFormatVersion, "unsupported version " + std::to_string(version));

    try {
        const json& a = doc.at("architecture");
        require(a.value("hidden_activation", "") == "relu" && a.value("output_activation", "") == "sigmoid",
                "unsupported activations");
        MlpArchitecture arch;
        arch.input_dim = a.at("input_dim").get<Index>();
        arch.hidden_sizes = a.at("hidden").get<std::vector<Index>>();
        arch.output_dim = a.at("output_dim").get<Index>();
        arch.validate();

        Checkpoint c;
        c.model = MlpModel(arch);
        const json& layers = doc.at("layers");
        require(layers.is_array() && layers.size() == arch.layer_count(), "layer count differs from architecture");
        for (std::size_t l = 0; l < arch.layer_count(); ++l) {
            auto& layer = c.model.layers()[l];
            const json& w = layers[l].at("weights");
            const json& b = layers[l].at("bias");
            require(w.is_array() && static_cast<Index>(w.size()) == layer.weights.rows(), "weight rows mismatch");
            require(b.is_array() && static_cast<Index>(b.size()) == layer.bias.size(), "bias length mismatch");
            for (Index r = 0; r < layer.weights.rows(); ++r) {
                const json& row = w[static_cast<std::size_t>(r)];
                require(row.is_array() && static_cast<Index>(row.size()) == layer.weights.cols(), "weight columns mismatch");
                for (Index k = 0; k < layer.weights.cols(); ++k) {
                    const json& v = row[static_cast<std::size_t>(k)];
                    require(v.is_number(), "non-numeric weight");
                    layer.weights(r, k) = v.get<double>();
                }
                const json& bv = b[static_cast<std::size_t>(r)];
                require(bv.is_number(), "non-numeric bias");
                layer.bias(r) = bv.get<double>();
            }
        }
        require(c.model.all_finite(), "non-finite parameters");

        const json& meta = doc.at("metadata");
        c.meta.final_bandwidths = meta.at("final_bandwidths").get<std::vector<double>>();
        c.meta.epochs = meta.at("epochs").get<int>();
        c.meta.stop_reason = meta.at("stop_reason").get<std::string>();
        c.meta.seed = meta.at("seed").get<std::uint64_t>();
        c.meta.seeds = meta.at("seeds").get<std::map<std::string, std::uint64_t>>();
        return c;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("checkpoint: malformed content: ") + e.what());
    } catch (const DimensionError& e) {
        throw std::invalid_argument(std::string("checkpoint: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    write_text_file(path, checkpoint_to_text(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return checkpoint_from_text(read_text_file(path)); }

}  // namespace agmmn
