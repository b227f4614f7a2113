#include "isac/dataset.hpp"

#include <cstring>
#include <fstream>

namespace isac {

namespace {

constexpr char kMagic[8] = {'I', 'S', 'A', 'C', 'C', 'F', 'R', '1'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32_le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f64_le(std::string& out, double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class Reader {
public:
    explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

    std::size_t offset() const { return pos_; }

    void expect(std::size_t n, const char* what) const {
        if (pos_ + n > bytes_.size())
            throw FormatError(std::string("truncated file while reading ") + what + ": expected " +
                                  std::to_string(pos_ + n) + " bytes, file has " +
                                  std::to_string(bytes_.size()),
                              pos_);
    }

    void read_raw(void* dst, std::size_t n, const char* what) {
        expect(n, what);
        std::memcpy(dst, bytes_.data() + pos_, n);
        pos_ += n;
    }

    std::uint8_t read_u8(const char* what) {
        std::uint8_t v;
        read_raw(&v, 1, what);
        return v;
    }

    std::uint32_t read_u32(const char* what) {
        expect(4, what);
        const auto* p = reinterpret_cast<const unsigned char*>(bytes_.data() + pos_);
        pos_ += 4;
        return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
               (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    }

    double read_f64(const char* what) {
        expect(8, what);
        const auto* p = reinterpret_cast<const unsigned char*>(bytes_.data() + pos_);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        pos_ += 8;
        double x;
        std::memcpy(&x, &bits, sizeof x);
        return x;
    }

private:
    std::string bytes_;
    std::size_t pos_ = 0;
};

std::vector<std::string> expected_axis_names(Mode mode) {
    if (mode == Mode::Adtr) return {"time_s", "frequency_hz", "port"};
    return {"rx_port", "tx_port", "frequency_hz"};
}

} // namespace

std::size_t CfrDataset::sample_count() const {
    std::size_t n = 1;
    for (const Axis& a : axes) n *= a.values.size();
    return axes.empty() ? 0 : n;
}

const Axis& CfrDataset::frequency_axis() const {
    for (const Axis& a : axes)
        if (a.name == "frequency_hz") return a;
    throw std::logic_error("dataset has no frequency axis");
}

double CfrDataset::carrier_hz() const {
    const Axis& f = frequency_axis();
    return 0.5 * (f.values.front() + f.values.back());
}

void write_dataset(const CfrDataset& d, const std::filesystem::path& path) {
    if (d.samples.size() != d.sample_count())
        throw std::invalid_argument("write_dataset: tensor size does not match axes");

    std::string out;
    out.reserve(64 + 8 * (d.samples.size() * 2 + 16) + d.metadata_json.size());
    out.append(kMagic, sizeof kMagic);
    put_u32_le(out, kFormatVersion);
    out.push_back(static_cast<char>(d.mode));
    out.push_back(static_cast<char>(d.axes.size()));
    for (const Axis& a : d.axes) put_u32_le(out, static_cast<std::uint32_t>(a.values.size()));
    for (const Axis& a : d.axes)
        for (double v : a.values) put_f64_le(out, v);
    for (const std::complex<double>& c : d.samples) {
        put_f64_le(out, c.real());
        put_f64_le(out, c.imag());
    }
    put_u32_le(out, static_cast<std::uint32_t>(d.metadata_json.size()));
    out.append(d.metadata_json);

    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write dataset: " + path.string());
        f.write(out.data(), static_cast<std::streamsize>(out.size()));
        if (!f) throw std::runtime_error("short write to dataset: " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

CfrDataset read_dataset(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open dataset: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    Reader r(std::move(bytes));

    char magic[8];
    r.read_raw(magic, sizeof magic, "magic");
    if (std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw FormatError("bad magic, not an ISACCFR1 file", 0);

    const std::uint32_t version = r.read_u32("version");
    if (version != kFormatVersion)
        throw FormatError("unsupported format version " + std::to_string(version), r.offset() - 4);

    const std::uint8_t mode_byte = r.read_u8("mode");
    if (mode_byte != static_cast<std::uint8_t>(Mode::Adtr) &&
        mode_byte != static_cast<std::uint8_t>(Mode::Satr))
        throw FormatError("unknown mode byte " + std::to_string(mode_byte), r.offset() - 1);

    CfrDataset d;
    d.mode = static_cast<Mode>(mode_byte);

    const std::uint8_t axis_count = r.read_u8("axis count");
    const auto names = expected_axis_names(d.mode);
    if (axis_count != names.size())
        throw FormatError("expected " + std::to_string(names.size()) + " axes, found " +
                              std::to_string(axis_count),
                          r.offset() - 1);

    std::vector<std::uint32_t> lens(axis_count);
    for (auto& len : lens) len = r.read_u32("axis length");

    d.axes.resize(axis_count);
    std::size_t total = 1;
    for (std::size_t i = 0; i < axis_count; ++i) {
        d.axes[i].name = names[i];
        d.axes[i].values.resize(lens[i]);
        for (auto& v : d.axes[i].values) v = r.read_f64("axis grid");
        total *= lens[i];
    }

    d.samples.resize(total);
    for (auto& c : d.samples) {
        const double re = r.read_f64("samples");
        const double im = r.read_f64("samples");
        c = {re, im};
    }

    const std::uint32_t meta_len = r.read_u32("metadata length");
    d.metadata_json.resize(meta_len);
    if (meta_len > 0) r.read_raw(d.metadata_json.data(), meta_len, "metadata");
    return d;
}

} // namespace isac
