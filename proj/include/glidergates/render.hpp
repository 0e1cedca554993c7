#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "glidergates/io.hpp"
#include "glidergates/network.hpp"

namespace gg {

struct Color {
    uint8_t r = 0, g = 0, b = 0;
};

namespace palette {
inline constexpr Color background{255, 255, 255};
inline constexpr Color static_off{70, 70, 220};
inline constexpr Color static_on{220, 60, 60};
inline constexpr Color cycling{235, 195, 40};
inline constexpr Color input_active{255, 255, 255};
inline constexpr Color input_border{20, 20, 20};
inline constexpr Color region1{235, 130, 130};
inline constexpr Color region2{80, 100, 235};
inline constexpr Color region3{140, 190, 140};
}  // namespace palette

class Image {
  public:
    Image(int w, int h, Color fill) : w_(w), h_(h), rgb_(size_t(w) * h * 3) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) set(x, y, fill);
    }

    int width() const { return w_; }
    int height() const { return h_; }

    void set(int x, int y, Color c) {
        if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
        size_t i = (size_t(y) * w_ + x) * 3;
        rgb_[i] = c.r;
        rgb_[i + 1] = c.g;
        rgb_[i + 2] = c.b;
    }

    void fill_rect(int cx, int cy, int half, Color c) {
        for (int y = cy - half; y <= cy + half; ++y)
            for (int x = cx - half; x <= cx + half; ++x) set(x, y, c);
    }

    void fill_circle(int cx, int cy, int r, Color c) {
        for (int y = cy - r; y <= cy + r; ++y)
            for (int x = cx - r; x <= cx + r; ++x)
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) set(x, y, c);
    }

    void circle_outline(int cx, int cy, double r, Color c) {
        int lo = int(std::floor(r + 1.5));
        for (int y = cy - lo; y <= cy + lo; ++y) {
            for (int x = cx - lo; x <= cx + lo; ++x) {
                double d = std::sqrt(double(x - cx) * (x - cx) + double(y - cy) * (y - cy));
                if (std::fabs(d - r) <= 0.75) set(x, y, c);
            }
        }
    }

    void fill_diamond(int cx, int cy, int r, Color c) {
        for (int y = cy - r; y <= cy + r; ++y)
            for (int x = cx - r; x <= cx + r; ++x)
                if (std::abs(x - cx) + std::abs(y - cy) <= r) set(x, y, c);
    }

    std::string to_ppm() const {
        std::string s = "P6\n" + std::to_string(w_) + " " + std::to_string(h_) + "\n255\n";
        s.append(reinterpret_cast<const char*>(rgb_.data()), rgb_.size());
        return s;
    }

  private:
    int w_, h_;
    std::vector<uint8_t> rgb_;
};

struct RenderResult {
    std::vector<std::string> frame_files;
    std::string manifest_file;
};

// One raster frame per trajectory step: nodes that never change are drawn as
// squares (off = blue, on = red), changing nodes as circles filled while on,
// input nodes as diamonds (filled white while active), and layout disks as
// colored rings.
inline RenderResult render_frames(const Network& net, const std::vector<TrajectoryFrame>& frames,
                                  const std::vector<LayoutDumpEntry>& layout_entries,
                                  const std::string& out_dir, int size = 512) {
    for (const TrajectoryFrame& f : frames)
        for (uint32_t id : f.active)
            if (id >= net.n()) throw std::runtime_error("trajectory node id out of range");

    std::vector<uint8_t> ever_on(net.n(), 0), ever_off(net.n(), frames.empty() ? 1 : 0);
    for (const TrajectoryFrame& f : frames) {
        std::vector<uint8_t> on(net.n(), 0);
        for (uint32_t id : f.active) on[id] = 1;
        for (uint32_t i = 0; i < net.n(); ++i) (on[i] ? ever_on : ever_off)[i] = 1;
    }

    std::filesystem::create_directories(out_dir);
    auto px = [&](double v) { return int(std::lround(v * (size - 1))); };

    RenderResult result;
    std::string manifest = std::to_string(frames.size()) + " " + std::to_string(size) + " " +
                           std::to_string(size) + "\n";
    for (size_t fi = 0; fi < frames.size(); ++fi) {
        const TrajectoryFrame& f = frames[fi];
        std::vector<uint8_t> on(net.n(), 0);
        for (uint32_t id : f.active) on[id] = 1;

        Image img(size, size, palette::background);
        for (const LayoutDumpEntry& e : layout_entries) {
            if (e.step != f.step) continue;
            Color c = e.label == "II" ? palette::region2
                      : e.label == "III" ? palette::region3
                                         : palette::region1;
            img.circle_outline(px(e.center.x), px(e.center.y), e.radius * (size - 1), c);
        }
        for (uint32_t i = 0; i < net.n(); ++i) {
            int x = px(net.pos[i].x), y = px(net.pos[i].y);
            if (net.is_input[i]) {
                img.fill_diamond(x, y, 5, palette::input_border);
                if (on[i]) img.fill_diamond(x, y, 3, palette::input_active);
            } else if (ever_on[i] && ever_off[i]) {
                if (on[i])
                    img.fill_circle(x, y, 2, palette::cycling);
                else
                    img.circle_outline(x, y, 2.0, palette::cycling);
            } else if (ever_on[i]) {
                img.fill_rect(x, y, 1, palette::static_on);
            } else {
                img.fill_rect(x, y, 1, palette::static_off);
            }
        }

        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06zu.ppm", fi);
        std::string path = out_dir + "/" + name;
        write_text_file(path, img.to_ppm());
        result.frame_files.push_back(path);
        manifest += std::to_string(f.step) + " " + name + "\n";
    }
    result.manifest_file = out_dir + "/frames.txt";
    write_text_file(result.manifest_file, manifest);
    return result;
}

}  // namespace gg
