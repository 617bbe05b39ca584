// PPM/PGM codec with byte-accurate error reporting, plus optional libjpeg
// decoding.

#include "dbcr/image_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#ifdef DBCR_HAVE_JPEG
#include <csetjmp>
#include <jpeglib.h>
#endif

namespace dbcr {

namespace {

// Incremental reader over the netpbm header grammar. Tracks the byte offset
// so errors can point at the exact position.
class PnmReader {
public:
    explicit PnmReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }
    const std::uint8_t* cursor() const { return bytes_.data() + pos_; }
    void advance(std::size_t n) { pos_ += n; }

    [[noreturn]] void fail(const std::string& what) const {
        throw DecodeError("pnm: " + what + " at byte " + std::to_string(pos_));
    }

    std::string magic() {
        if (remaining() < 2) fail("missing magic");
        std::string m(reinterpret_cast<const char*>(cursor()), 2);
        pos_ += 2;
        return m;
    }

    // Whitespace and '#' comments separate header tokens.
    void skip_separators() {
        while (pos_ < bytes_.size()) {
            const std::uint8_t c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos_;
            } else {
                break;
            }
        }
    }

    int header_int(const char* name) {
        skip_separators();
        if (pos_ >= bytes_.size()) fail(std::string("missing ") + name);
        if (!isdigit(bytes_[pos_]))
            fail(std::string("malformed ") + name);
        long value = 0;
        while (pos_ < bytes_.size() && isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000'000) fail(std::string(name) + " out of range");
            ++pos_;
        }
        return static_cast<int>(value);
    }

    // Exactly one whitespace byte separates the maxval from the payload.
    void payload_separator() {
        if (pos_ >= bytes_.size()) fail("missing payload separator");
        const std::uint8_t c = bytes_[pos_];
        if (c != ' ' && c != '\t' && c != '\r' && c != '\n')
            fail("malformed payload separator");
        ++pos_;
    }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

RgbPixelGrid decode_pnm(const std::vector<std::uint8_t>& bytes, bool color) {
    PnmReader r(bytes);
    r.magic();
    const int width = r.header_int("width");
    const int height = r.header_int("height");
    const int maxval = r.header_int("maxval");
    if (width < 1 || height < 1) r.fail("non-positive dimensions");
    if (maxval < 1 || maxval > 255) r.fail("unsupported maxval (want 1..255)");
    r.payload_separator();

    const std::size_t pixels = static_cast<std::size_t>(width) * height;
    const std::size_t need = pixels * (color ? 3 : 1);
    if (r.remaining() < need) {
        std::ostringstream msg;
        msg << "pnm: truncated payload at byte " << r.offset() + r.remaining()
            << " (need " << need << " bytes, have " << r.remaining() << ")";
        throw DecodeError(msg.str());
    }

    const std::uint8_t* p = r.cursor();
    if (color) {
        std::vector<double> red(pixels), green(pixels), blue(pixels);
        for (std::size_t i = 0; i < pixels; ++i) {
            red[i] = p[3 * i];
            green[i] = p[3 * i + 1];
            blue[i] = p[3 * i + 2];
        }
        return {PixelGrid(width, height, std::move(red)),
                PixelGrid(width, height, std::move(green)),
                PixelGrid(width, height, std::move(blue))};
    }
    std::vector<double> gray(pixels);
    for (std::size_t i = 0; i < pixels; ++i) gray[i] = p[i];
    PixelGrid g(width, height, std::move(gray));
    return {g, g, g};
}

std::uint8_t quantize(double v) {
    const long q = std::lround(v);
    return static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
}

#ifdef DBCR_HAVE_JPEG

struct JpegErrorTrap {
    jpeg_error_mgr mgr;
    std::jmp_buf env;
    char message[JMSG_LENGTH_MAX] = {0};
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* trap = reinterpret_cast<JpegErrorTrap*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, trap->message);
    std::longjmp(trap->env, 1);
}

RgbPixelGrid decode_jpeg(const std::vector<std::uint8_t>& bytes) {
    jpeg_decompress_struct cinfo;
    JpegErrorTrap trap;
    cinfo.err = jpeg_std_error(&trap.mgr);
    trap.mgr.error_exit = jpeg_error_exit;

    if (setjmp(trap.env)) {
        jpeg_destroy_decompress(&cinfo);
        throw DecodeError(std::string("jpeg: ") + trap.message);
    }

    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), bytes.size());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    const int width = static_cast<int>(cinfo.output_width);
    const int height = static_cast<int>(cinfo.output_height);
    const std::size_t pixels = static_cast<std::size_t>(width) * height;
    std::vector<double> red(pixels), green(pixels), blue(pixels);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(width) * 3);

    while (cinfo.output_scanline < cinfo.output_height) {
        std::uint8_t* rows[1] = {row.data()};
        const std::size_t y = cinfo.output_scanline;
        jpeg_read_scanlines(&cinfo, rows, 1);
        for (int x = 0; x < width; ++x) {
            red[y * width + x] = row[3 * x];
            green[y * width + x] = row[3 * x + 1];
            blue[y * width + x] = row[3 * x + 2];
        }
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);

    return {PixelGrid(width, height, std::move(red)),
            PixelGrid(width, height, std::move(green)),
            PixelGrid(width, height, std::move(blue))};
}

#endif // DBCR_HAVE_JPEG

} // namespace

bool jpeg_supported() {
#ifdef DBCR_HAVE_JPEG
    return true;
#else
    return false;
#endif
}

RgbPixelGrid decode_image(const std::vector<std::uint8_t>& bytes,
                          const std::string& format_hint) {
    if (bytes.size() < 2) throw DecodeError("image: too short at byte 0");

    if (bytes[0] == 'P' && bytes[1] == '6') return decode_pnm(bytes, true);
    if (bytes[0] == 'P' && bytes[1] == '5') return decode_pnm(bytes, false);

    if (bytes[0] == 0xFF && bytes[1] == 0xD8) {
#ifdef DBCR_HAVE_JPEG
        return decode_jpeg(bytes);
#else
        throw DecodeError("jpeg: decoding not built in (libjpeg missing)");
#endif
    }
    if (bytes[0] == 0x89 && bytes[1] == 'P')
        throw DecodeError("png: decoding not built in");
    if (bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '3'))
        throw DecodeError("pnm: ASCII variants not supported at byte 1 "
                          "(want binary P5/P6)");

    throw DecodeError("image: unrecognized format (hint '" + format_hint +
                      "') at byte 0");
}

std::vector<std::uint8_t> encode_ppm(const RgbPixelGrid& img) {
    char header[64];
    const int n = std::snprintf(header, sizeof header, "P6\n%d %d\n255\n",
                                img.width(), img.height());
    std::vector<std::uint8_t> out(header, header + n);
    out.reserve(out.size() + img.r.size() * 3);
    for (std::size_t i = 0; i < img.r.size(); ++i) {
        out.push_back(quantize(img.r.samples()[i]));
        out.push_back(quantize(img.g.samples()[i]));
        out.push_back(quantize(img.b.samples()[i]));
    }
    return out;
}

std::vector<std::uint8_t> encode_pgm(const PixelGrid& gray) {
    char header[64];
    const int n = std::snprintf(header, sizeof header, "P5\n%d %d\n255\n",
                                gray.width(), gray.height());
    std::vector<std::uint8_t> out(header, header + n);
    out.reserve(out.size() + gray.size());
    for (double v : gray.samples()) out.push_back(quantize(v));
    return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for " + path.string());
    return bytes;
}

void write_file(const std::filesystem::path& path,
                const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

RgbPixelGrid load_image(const std::filesystem::path& path) {
    try {
        return decode_image(read_file(path), path.extension().string());
    } catch (const DecodeError& e) {
        throw DecodeError(path.string() + ": " + e.what());
    }
}

} // namespace dbcr
