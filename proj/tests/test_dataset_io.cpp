#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "isac/dataset.hpp"

using namespace isac;

namespace {

CfrDataset sample_dataset(std::size_t nt = 4, std::size_t nf = 5, std::size_t ports = 3) {
    CfrDataset d;
    d.mode = Mode::Adtr;
    d.axes.resize(3);
    d.axes[0].name = "time_s";
    for (std::size_t i = 0; i < nt; ++i) d.axes[0].values.push_back(1e-3 * double(i));
    d.axes[1].name = "frequency_hz";
    for (std::size_t j = 0; j < nf; ++j) d.axes[1].values.push_back(3.48e9 + 1e7 * double(j));
    d.axes[2].name = "port";
    for (std::size_t k = 0; k < ports; ++k) d.axes[2].values.push_back(double(k));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    d.samples.resize(nt * nf * ports);
    for (auto& c : d.samples) c = {uni(rng), uni(rng)};
    d.metadata_json = R"({"label":"t1","note":"fixture"})";
    return d;
}

std::string file_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const char* name) : path(std::filesystem::temp_directory_path() / name) {}
    ~TempFile() { std::filesystem::remove(path); }
};

} // namespace

TEST_CASE("dataset write/read round trip is bit-exact") {
    const CfrDataset d = sample_dataset();
    TempFile f("isac_ds_roundtrip.cfr");
    write_dataset(d, f.path);
    const CfrDataset r = read_dataset(f.path);

    CHECK(r.mode == d.mode);
    REQUIRE(r.axes.size() == 3);
    for (std::size_t a = 0; a < 3; ++a) {
        CHECK(r.axes[a].name == d.axes[a].name);
        REQUIRE(r.axes[a].values.size() == d.axes[a].values.size());
        CHECK(std::memcmp(r.axes[a].values.data(), d.axes[a].values.data(),
                          d.axes[a].values.size() * sizeof(double)) == 0);
    }
    REQUIRE(r.samples.size() == d.samples.size());
    CHECK(std::memcmp(r.samples.data(), d.samples.data(),
                      d.samples.size() * sizeof(std::complex<double>)) == 0);
    CHECK(r.metadata_json == d.metadata_json); // snapshot label preserved

    // a second write of the re-read dataset produces identical bytes
    TempFile f2("isac_ds_rewrite.cfr");
    write_dataset(r, f2.path);
    CHECK(file_bytes(f.path) == file_bytes(f2.path));
}

TEST_CASE("file size follows the format arithmetic") {
    const std::size_t nt = 4, nf = 5, ports = 3;
    const CfrDataset d = sample_dataset(nt, nf, ports);
    TempFile f("isac_ds_size.cfr");
    write_dataset(d, f.path);
    const std::size_t expected = 8 + 4 + 1 + 1 + 3 * 4          // magic, version, mode, axes
                                 + (nt + nf + ports) * 8        // axis grids
                                 + nt * nf * ports * 16         // complex samples
                                 + 4 + d.metadata_json.size();  // metadata blob
    CHECK(std::filesystem::file_size(f.path) == expected);
}

TEST_CASE("truncated file reports expected vs actual length") {
    const CfrDataset d = sample_dataset();
    TempFile f("isac_ds_trunc.cfr");
    write_dataset(d, f.path);
    const std::string bytes = file_bytes(f.path);

    TempFile cut("isac_ds_cut.cfr");
    {
        std::ofstream out(cut.path, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    }
    try {
        read_dataset(cut.path);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("truncated") != std::string::npos);
        CHECK(msg.find("expected") != std::string::npos);
        CHECK(e.byte_offset() > 0);
        CHECK(e.byte_offset() <= bytes.size() / 2);
    }
}

TEST_CASE("bad magic rejected") {
    TempFile f("isac_ds_magic.cfr");
    {
        std::ofstream out(f.path, std::ios::binary);
        out << "NOTACFR0" << std::string(64, '\0');
    }
    CHECK_THROWS_AS(read_dataset(f.path), FormatError);
}

TEST_CASE("unknown version and mode rejected") {
    const CfrDataset d = sample_dataset();
    TempFile f("isac_ds_verbyte.cfr");
    write_dataset(d, f.path);
    std::string bytes = file_bytes(f.path);

    SUBCASE("version") {
        bytes[8] = 9; // version u32 little-endian starts at offset 8
        TempFile g("isac_ds_badver.cfr");
        std::ofstream(g.path, std::ios::binary).write(bytes.data(), bytes.size());
        CHECK_THROWS_AS(read_dataset(g.path), FormatError);
    }
    SUBCASE("mode") {
        bytes[12] = 7; // mode byte
        TempFile g("isac_ds_badmode.cfr");
        std::ofstream(g.path, std::ios::binary).write(bytes.data(), bytes.size());
        CHECK_THROWS_AS(read_dataset(g.path), FormatError);
    }
}

TEST_CASE("writer validates tensor shape") {
    CfrDataset d = sample_dataset();
    d.samples.pop_back();
    TempFile f("isac_ds_shape.cfr");
    CHECK_THROWS_AS(write_dataset(d, f.path), std::invalid_argument);
}
