#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace bamc {

// Interleaved 8-bit RGB, row-major.
struct Rgb8Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // 3 * width * height

    std::uint8_t* pixel(int row, int col) { return data.data() + 3 * (row * width + col); }
    const std::uint8_t* pixel(int row, int col) const { return data.data() + 3 * (row * width + col); }
};

// Single-channel 8-bit, row-major. Saliency maps and ground-truth masks.
struct GrayImage8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // width * height

    std::uint8_t& at(int row, int col) { return data[row * width + col]; }
    std::uint8_t at(int row, int col) const { return data[row * width + col]; }
};

// Interleaved CIELAB, every channel affinely mapped to [0,1]:
// L/100, (a+128)/255, (b+128)/255.
struct LabImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;  // 3 * width * height

    const double* pixel(int row, int col) const { return data.data() + 3 * (row * width + col); }
    std::array<double, 3> lab(int row, int col) const {
        const double* p = pixel(row, col);
        return {p[0], p[1], p[2]};
    }
};

// sRGB (D65) to normalized CIELAB. Throws InvalidInput on empty images.
LabImage rgb_to_lab(const Rgb8Image& image);

// Single-color conversions used by the synthetic generator and tests.
std::array<double, 3> rgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Inverse map from normalized CIELAB. Returns false when the color falls
// outside the sRGB gamut (out is left clamped in that case).
bool lab_to_rgb(const std::array<double, 3>& lab_norm, std::array<std::uint8_t, 3>& out);

// PNG/JPEG file IO. Loading throws DecodeError when the file is missing or
// undecodable; saving throws Error on write failure.
Rgb8Image load_rgb8(const std::string& path);
GrayImage8 load_gray8(const std::string& path);
void save_png(const Rgb8Image& image, const std::string& path);
void save_png(const GrayImage8& image, const std::string& path);
// 16-bit single channel; used for superpixel label dumps.
void save_png16(const std::vector<std::uint16_t>& data, int width, int height, const std::string& path);

}  // namespace bamc
