#include "sarsim/vision/image.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>
#include <string>

namespace sarsim::vision {

RgbImage RgbImage::solid(int w, int h, std::array<std::uint8_t, 3> rgb) {
    RgbImage img(w, h);
    for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
        img.pixels[i] = rgb[0];
        img.pixels[i + 1] = rgb[1];
        img.pixels[i + 2] = rgb[2];
    }
    return img;
}

namespace {

// Reads the next PPM header token, skipping whitespace and # comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok;
}

}  // namespace

RgbImage read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open image: " + path.string());
    if (next_token(in) != "P6") {
        throw std::runtime_error(path.string() + ": not a binary PPM (P6) file");
    }
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(next_token(in));
        h = std::stoi(next_token(in));
        maxval = std::stoi(next_token(in));
    } catch (const std::exception&) {
        throw std::runtime_error(path.string() + ": malformed PPM header");
    }
    if (w <= 0 || h <= 0) throw std::runtime_error(path.string() + ": bad PPM dimensions");
    if (maxval != 255) throw std::runtime_error(path.string() + ": PPM maxval must be 255");

    RgbImage img(w, h);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
        throw std::runtime_error(path.string() + ": truncated PPM pixel data");
    }
    return img;
}

void write_ppm(const RgbImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write image: " + path.string());
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw std::runtime_error("short write: " + path.string());
}

}  // namespace sarsim::vision
