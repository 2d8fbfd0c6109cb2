#include "adaprune/archive.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <fstream>
#include <iterator>
#include <sstream>

namespace adaprune {

namespace {

using json = nlohmann::json;
using Kind = ArchiveError::Kind;

constexpr std::size_t kHeaderBytes = 6 + 8;

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint64_t get_u64(std::string_view bytes, std::size_t at) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
    return v;
}

std::size_t element_count(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

[[noreturn]] void fail(Kind kind, const std::string& msg) { throw ArchiveError(kind, msg); }

struct Decoded {
    TensorArchive archive;
    json manifest;
};

json tensor_table(const TensorArchive& archive, std::uint64_t& payload_bytes) {
    json table = json::array();
    std::uint64_t offset = 0;
    for (const auto& t : archive.tensors) {
        const std::size_t count = element_count(t.shape);
        if (count != t.value.size()) {
            fail(Kind::manifest, "tensor '" + t.name + "' shape does not match its data");
        }
        table.push_back({{"name", t.name},
                         {"dtype", "f64"},
                         {"shape", t.shape},
                         {"count", count},
                         {"offset", offset}});
        offset += static_cast<std::uint64_t>(count) * 8;
    }
    payload_bytes = offset;
    return table;
}

std::string assemble(const TensorArchive& archive, json manifest) {
    std::uint64_t payload_bytes = 0;
    manifest["format"] = "ADPR";
    manifest["version"] = 1;
    manifest["name"] = archive.name;
    manifest["metadata"] = archive.metadata;
    manifest["tensors"] = tensor_table(archive, payload_bytes);
    manifest["payload_bytes"] = payload_bytes;
    const std::string text = manifest.dump();

    std::string out;
    out.reserve(kHeaderBytes + text.size() + payload_bytes);
    out.append(kArchiveMagic);
    put_u64(out, text.size());
    out.append(text);
    for (const auto& t : archive.tensors)
        for (double v : t.value.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
    return out;
}

Decoded decode(std::string_view bytes) {
    if (bytes.size() < kArchiveMagic.size() ||
        bytes.substr(0, kArchiveMagic.size()) != kArchiveMagic) {
        fail(Kind::bad_magic, "not a tensor archive: expected magic \"ADPR1\\n\" at offset 0");
    }
    if (bytes.size() < kHeaderBytes) fail(Kind::truncated, "archive truncated inside the header");
    const std::uint64_t manifest_len = get_u64(bytes, kArchiveMagic.size());
    if (manifest_len > bytes.size() - kHeaderBytes) {
        fail(Kind::truncated, "archive truncated inside the manifest");
    }
    const std::string_view payload = bytes.substr(kHeaderBytes + manifest_len);

    Decoded d;
    try {
        d.manifest = json::parse(bytes.substr(kHeaderBytes, manifest_len));
    } catch (const json::exception& e) {
        fail(Kind::manifest, std::string("manifest is not valid JSON: ") + e.what());
    }
    const json& m = d.manifest;
    try {
        if (m.at("format").get<std::string>() != "ADPR" || m.at("version").get<int>() != 1) {
            fail(Kind::manifest, "unsupported archive format or version");
        }
        const auto payload_bytes = m.at("payload_bytes").get<std::uint64_t>();
        if (payload.size() < payload_bytes) {
            std::ostringstream os;
            os << "archive payload truncated: " << payload.size() << " of " << payload_bytes
               << " bytes present";
            fail(Kind::truncated, os.str());
        }
        if (payload.size() > payload_bytes) fail(Kind::manifest, "trailing bytes after payload");

        d.archive.name = m.value("name", std::string{});
        if (m.contains("metadata"))
            d.archive.metadata = m.at("metadata").get<std::map<std::string, std::string>>();

        std::vector<std::pair<std::uint64_t, std::uint64_t>> spans;
        for (const json& t : m.at("tensors")) {
            NamedTensor tensor;
            tensor.name = t.at("name").get<std::string>();
            if (t.at("dtype").get<std::string>() != "f64") {
                fail(Kind::manifest, "tensor '" + tensor.name + "' has unsupported dtype");
            }
            tensor.shape = t.at("shape").get<std::vector<std::size_t>>();
            if (tensor.shape.empty() || tensor.shape.size() > 2) {
                fail(Kind::manifest, "tensor '" + tensor.name + "' must be 1-D or 2-D");
            }
            const auto count = t.at("count").get<std::uint64_t>();
            if (count != element_count(tensor.shape)) {
                fail(Kind::manifest, "tensor '" + tensor.name +
                                         "' element count does not match its shape");
            }
            const auto offset = t.at("offset").get<std::uint64_t>();
            if (offset % 8 != 0 || offset > payload_bytes || count > (payload_bytes - offset) / 8) {
                std::ostringstream os;
                os << "tensor '" << tensor.name << "' (" << count << " elements at byte " << offset
                   << ") exceeds the " << payload_bytes << "-byte payload";
                fail(Kind::bounds, os.str());
            }
            spans.emplace_back(offset, offset + count * 8);

            std::vector<double> values(count);
            for (std::size_t i = 0; i < count; ++i)
                values[i] = std::bit_cast<double>(get_u64(payload, offset + 8 * i));
            const std::size_t rows = tensor.shape.size() == 2 ? tensor.shape[0] : 1;
            const std::size_t cols = tensor.shape.size() == 2 ? tensor.shape[1] : tensor.shape[0];
            tensor.value = Matrix(rows, cols, std::move(values));
            d.archive.tensors.push_back(std::move(tensor));
        }
        std::sort(spans.begin(), spans.end());
        for (std::size_t i = 1; i < spans.size(); ++i) {
            if (spans[i].first < spans[i - 1].second) fail(Kind::bounds, "tensor blocks overlap");
        }
    } catch (const json::exception& e) {
        fail(Kind::manifest, std::string("malformed manifest: ") + e.what());
    } catch (const ArchiveError&) {
        throw;
    } catch (const DataError& e) {
        fail(Kind::manifest, e.what());
    }
    return d;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Kind::io, "cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Kind::io, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(Kind::io, "short write to " + path.string());
}

std::string weight_name(std::size_t l) { return "layers." + std::to_string(l) + ".weight"; }
std::string bias_name(std::size_t l) { return "layers." + std::to_string(l) + ".bias"; }

}  // namespace

const NamedTensor* TensorArchive::find(std::string_view tensor_name) const {
    for (const auto& t : tensors)
        if (t.name == tensor_name) return &t;
    return nullptr;
}

std::string encode_archive(const TensorArchive& archive) { return assemble(archive, json::object()); }

TensorArchive decode_archive(std::string_view bytes) { return decode(bytes).archive; }

void save_tensors(const TensorArchive& archive, const std::filesystem::path& path) {
    write_file(path, encode_archive(archive));
}

TensorArchive load_tensors(const std::filesystem::path& path) {
    return decode_archive(read_file(path));
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
    ckpt.validate();
    TensorArchive archive{ckpt.name, ckpt.metadata, {}};
    json layers = json::array();
    for (std::size_t l = 0; l < ckpt.layers.size(); ++l) {
        const Layer& layer = ckpt.layers[l];
        archive.tensors.push_back({weight_name(l), {layer.d_out(), layer.d_in()}, layer.weight});
        json entry = {{"weight", weight_name(l)},
                      {"activation", std::string(to_string(layer.activation))},
                      {"prunable", layer.prunable}};
        if (layer.bias) {
            archive.tensors.push_back({bias_name(l), {layer.bias->size()},
                                       Matrix::row_vector(*layer.bias)});
            entry["bias"] = bias_name(l);
        } else {
            entry["bias"] = nullptr;
        }
        layers.push_back(std::move(entry));
    }
    return assemble(archive, json{{"layers", std::move(layers)}});
}

Checkpoint decode_checkpoint(std::string_view bytes) {
    Decoded d = decode(bytes);
    if (!d.manifest.contains("layers")) {
        fail(Kind::manifest, "archive has no layer topology; it is not a checkpoint");
    }
    Checkpoint ckpt;
    ckpt.name = d.archive.name;
    ckpt.metadata = d.archive.metadata;
    try {
        for (const json& entry : d.manifest.at("layers")) {
            const auto wname = entry.at("weight").get<std::string>();
            const NamedTensor* w = d.archive.find(wname);
            if (!w || w->shape.size() != 2) {
                fail(Kind::manifest, "layer weight tensor '" + wname + "' missing or not 2-D");
            }
            Layer layer;
            layer.weight = w->value;
            layer.activation = parse_activation(entry.at("activation").get<std::string>());
            layer.prunable = entry.at("prunable").get<bool>();
            if (!entry.at("bias").is_null()) {
                const auto bname = entry.at("bias").get<std::string>();
                const NamedTensor* b = d.archive.find(bname);
                if (!b) fail(Kind::manifest, "layer bias tensor '" + bname + "' missing");
                auto values = b->value.data();
                layer.bias = std::vector<double>(values.begin(), values.end());
            }
            ckpt.layers.push_back(std::move(layer));
        }
        ckpt.validate();
    } catch (const json::exception& e) {
        fail(Kind::manifest, std::string("malformed layer topology: ") + e.what());
    } catch (const ArchiveError&) {
        throw;
    } catch (const DataError& e) {
        fail(Kind::manifest, e.what());
    }
    return ckpt;
}

void save_archive(const Checkpoint& ckpt, const std::filesystem::path& path) {
    write_file(path, encode_checkpoint(ckpt));
}

Checkpoint load_archive(const std::filesystem::path& path) {
    return decode_checkpoint(read_file(path));
}

void save_matrix(const Matrix& m, std::string_view tensor_name, const std::filesystem::path& path) {
    TensorArchive archive;
    archive.name = std::string(tensor_name);
    archive.tensors.push_back({std::string(tensor_name), {m.rows(), m.cols()}, m});
    save_tensors(archive, path);
}

Matrix load_matrix(const std::filesystem::path& path, std::string_view tensor_name) {
    const TensorArchive archive = load_tensors(path);
    if (const NamedTensor* t = archive.find(tensor_name)) return t->value;
    fail(Kind::manifest,
         path.string() + " has no tensor named '" + std::string(tensor_name) + "'");
}

std::uint64_t payload_checksum(const TensorArchive& archive) {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& t : archive.tensors) {
        for (double v : t.value.data()) {
            const auto bits = std::bit_cast<std::uint64_t>(v);
            for (int i = 0; i < 8; ++i) {
                h ^= (bits >> (8 * i)) & 0xffu;
                h *= 1099511628211ull;
            }
        }
    }
    return h;
}

}  // namespace adaprune
