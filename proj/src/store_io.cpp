#include "decentmem/store_io.hpp"
#include "decentmem/errors.hpp"

#include <json.hpp>

#include <fstream>

namespace decentmem {

using nlohmann::json;

namespace {

constexpr int kStoreVersion = 1;

json piece_to_json(const MemoryPiece& p, const char* pool) {
    json alloc = json::array();
    for (const auto& a : p.trajectory.allocation) {
        alloc.push_back({{"subtask", a.subtask}, {"agent", a.agent_id}});
    }
    return json{
        {"pool", pool},
        {"id", p.id},
        {"context", p.context_prototype},
        {"embedding", p.context_embedding.values()},
        {"trajectory",
         {{"action", to_string(p.trajectory.action_type)},
          {"payload", p.trajectory.payload},
          {"allocation", alloc},
          {"stage", p.trajectory.stage_index}}},
        {"commentary", p.commentary},
        {"quality", p.quality},
        {"created_at", p.created_at},
        {"origin", to_string(p.origin)},
    };
}

ActionType action_from_string(const std::string& s, long record) {
    if (s == "decompose") return ActionType::Decompose;
    if (s == "direct_answer") return ActionType::DirectAnswer;
    if (s == "forward") return ActionType::Forward;
    throw StoreFormatError("unknown action type '" + s + "'", record);
}

MemoryPiece piece_from_json(const json& j, std::size_t expected_dim, long record) {
    MemoryPiece p;
    try {
        p.id = j.at("id").get<std::uint64_t>();
        p.context_prototype = j.at("context").get<std::string>();
        auto values = j.at("embedding").get<std::vector<double>>();
        if (expected_dim != 0 && values.size() != expected_dim) {
            throw DimensionError("record " + std::to_string(record) +
                                 ": embedding dimension " +
                                 std::to_string(values.size()) + ", expected " +
                                 std::to_string(expected_dim));
        }
        p.context_embedding = EmbeddingVector(std::move(values));
        const json& t = j.at("trajectory");
        p.trajectory.action_type =
            action_from_string(t.at("action").get<std::string>(), record);
        p.trajectory.payload = t.at("payload").get<std::string>();
        for (const auto& a : t.at("allocation")) {
            p.trajectory.allocation.push_back(
                {a.at("subtask").get<std::string>(), a.at("agent").get<std::string>()});
        }
        p.trajectory.stage_index = t.at("stage").get<int>();
        p.commentary = j.at("commentary").get<std::string>();
        p.quality = j.at("quality").get<double>();
        p.created_at = j.at("created_at").get<std::uint64_t>();
        const auto origin = j.at("origin").get<std::string>();
        p.origin = origin == "consolidated" ? PieceOrigin::Consolidated
                                            : PieceOrigin::Exploratory;
    } catch (const json::exception& e) {
        throw StoreFormatError("record " + std::to_string(record) + ": " + e.what(),
                               record);
    }
    return p;
}

} // namespace

void save_store(const DualPoolMemory& memory, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw StoreFileError("cannot open store for writing: " + path.string());
    }
    std::size_t dim = 0;
    if (!memory.e_pool().empty()) dim = memory.e_pool().front().context_embedding.dimension();
    else if (!memory.x_pool().empty()) dim = memory.x_pool().front().context_embedding.dimension();
    const RouterState& r = memory.router();
    json header{
        {"format", "decentmem-store"},
        {"version", kStoreVersion},
        {"agent_id", memory.agent_id()},
        {"dimension", dim},
        {"router",
         {{"w_e", r.w_e},
          {"w_x", r.w_x},
          {"increment", r.increment},
          {"decay", r.decay},
          {"floor", r.floor}}},
    };
    out << header.dump() << '\n';
    for (const auto& p : memory.e_pool()) out << piece_to_json(p, "E").dump() << '\n';
    for (const auto& p : memory.x_pool()) out << piece_to_json(p, "X").dump() << '\n';
    if (!out) {
        throw StoreFileError("write failed: " + path.string());
    }
}

DualPoolMemory load_store(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw StoreFileError("cannot open store: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw StoreFormatError("missing header record", 0);
    }
    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw StoreFormatError(std::string("malformed header: ") + e.what(), 0);
    }
    if (header.value("format", "") != "decentmem-store") {
        throw StoreFormatError("not a decentmem store (bad format tag)", 0);
    }
    if (header.value("version", -1) > kStoreVersion) {
        throw StoreFormatError("store version newer than supported", 0);
    }
    RouterState r;
    std::size_t dim = 0;
    std::string agent_id;
    try {
        agent_id = header.at("agent_id").get<std::string>();
        dim = header.at("dimension").get<std::size_t>();
        const json& jr = header.at("router");
        r.w_e = jr.at("w_e").get<double>();
        r.w_x = jr.at("w_x").get<double>();
        r.increment = jr.at("increment").get<double>();
        r.decay = jr.at("decay").get<double>();
        r.floor = jr.at("floor").get<double>();
    } catch (const json::exception& e) {
        throw StoreFormatError(std::string("malformed header: ") + e.what(), 0);
    }

    std::vector<MemoryPiece> e_pool, x_pool;
    long record = 0;
    while (std::getline(in, line)) {
        ++record;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw StoreFormatError(
                "record " + std::to_string(record) + ": " + e.what(), record);
        }
        const std::string pool = j.value("pool", "");
        MemoryPiece p = piece_from_json(j, dim, record);
        if (pool == "E") e_pool.push_back(std::move(p));
        else if (pool == "X") x_pool.push_back(std::move(p));
        else throw StoreFormatError("record " + std::to_string(record) +
                                    ": unknown pool tag '" + pool + "'", record);
    }
    DualPoolMemory m(agent_id, r);
    m.restore(std::move(e_pool), std::move(x_pool));
    return m;
}

} // namespace decentmem
