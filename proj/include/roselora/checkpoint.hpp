#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "roselora/matrix.hpp"

namespace roselora {

enum class CheckpointErrorCode {
    IoFailure,
    CorruptHeader,
    VersionMismatch,
    ShapeMismatch,
    CorruptPayload,
};

struct CheckpointError : std::runtime_error {
    CheckpointErrorCode code;
    CheckpointError(CheckpointErrorCode c, const std::string& msg)
        : std::runtime_error(msg), code(c) {}
};

// Named-tensor container with a versioned binary on-disk format:
// magic "RLCK", u32 version, u32 header length, JSON header (shapes, dtype,
// step, config digest), then raw little-endian f64 payloads in header order.
struct Checkpoint {
    static constexpr std::uint32_t kVersion = 1;

    std::size_t step = 0;
    std::string config_digest;
    std::vector<std::pair<std::string, Matrix>> tensors;

    const Matrix& tensor(const std::string& name) const {
        for (const auto& [n, m] : tensors) {
            if (n == name) return m;
        }
        throw CheckpointError(CheckpointErrorCode::ShapeMismatch,
                              "checkpoint has no tensor named " + name);
    }
};

namespace detail {

inline void write_u32(std::ostream& os, std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(buf, 4);
}

inline std::uint32_t read_u32(std::istream& is) {
    unsigned char buf[4];
    is.read(reinterpret_cast<char*>(buf), 4);
    if (!is) {
        throw CheckpointError(CheckpointErrorCode::CorruptHeader, "truncated header field");
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    return v;
}

inline void write_f64(std::ostream& os, double d) {
    const auto bits = std::bit_cast<std::uint64_t>(d);
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    os.write(buf, 8);
}

inline double read_f64(std::istream& is) {
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    if (!is) {
        throw CheckpointError(CheckpointErrorCode::CorruptPayload, "truncated payload");
    }
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

} // namespace detail

inline void save_checkpoint(const std::string& path, const Checkpoint& cp) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw CheckpointError(CheckpointErrorCode::IoFailure, "cannot open " + path);
    }
    nlohmann::json header;
    header["dtype"] = "f64";
    header["step"] = cp.step;
    header["config_digest"] = cp.config_digest;
    header["tensors"] = nlohmann::json::array();
    for (const auto& [name, m] : cp.tensors) {
        header["tensors"].push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
    }
    const std::string header_str = header.dump();

    os.write("RLCK", 4);
    detail::write_u32(os, Checkpoint::kVersion);
    detail::write_u32(os, static_cast<std::uint32_t>(header_str.size()));
    os.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    for (const auto& [name, m] : cp.tensors) {
        for (std::size_t i = 0; i < m.size(); ++i) {
            detail::write_f64(os, m.at(i));
        }
    }
    if (!os) {
        throw CheckpointError(CheckpointErrorCode::IoFailure, "write failed for " + path);
    }
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw CheckpointError(CheckpointErrorCode::IoFailure, "cannot open " + path);
    }
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "RLCK") {
        throw CheckpointError(CheckpointErrorCode::CorruptHeader, "bad magic bytes");
    }
    const std::uint32_t version = detail::read_u32(is);
    if (version != Checkpoint::kVersion) {
        throw CheckpointError(CheckpointErrorCode::VersionMismatch,
                              "checkpoint version " + std::to_string(version) +
                                  ", reader supports " + std::to_string(Checkpoint::kVersion));
    }
    const std::uint32_t header_len = detail::read_u32(is);
    std::string header_str(header_len, '\0');
    is.read(header_str.data(), header_len);
    if (!is) {
        throw CheckpointError(CheckpointErrorCode::CorruptHeader, "truncated header");
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_str);
    } catch (const nlohmann::json::exception&) {
        throw CheckpointError(CheckpointErrorCode::CorruptHeader, "unparsable header");
    }
    if (!header.contains("dtype") || header["dtype"] != "f64" || !header.contains("tensors")) {
        throw CheckpointError(CheckpointErrorCode::CorruptHeader, "missing header fields");
    }

    Checkpoint cp;
    cp.step = header.value("step", std::size_t{0});
    cp.config_digest = header.value("config_digest", std::string{});
    for (const auto& t : header["tensors"]) {
        const auto rows = t.at("rows").get<std::size_t>();
        const auto cols = t.at("cols").get<std::size_t>();
        if (rows == 0 || cols == 0) {
            throw CheckpointError(CheckpointErrorCode::ShapeMismatch,
                                  "tensor with zero dimension in header");
        }
        Matrix m(rows, cols);
        for (std::size_t i = 0; i < m.size(); ++i) {
            m.at(i) = detail::read_f64(is);
        }
        cp.tensors.emplace_back(t.at("name").get<std::string>(), std::move(m));
    }
    // Trailing bytes mean the payload does not match the declared shapes.
    is.peek();
    if (!is.eof()) {
        throw CheckpointError(CheckpointErrorCode::CorruptPayload,
                              "payload longer than declared shapes");
    }
    return cp;
}

} // namespace roselora
