/*
 Copyright 2026 The lightaug Authors.
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <cstdint>
#include <vector>

#include "lightaug/core_model.hpp"

namespace lightaug::imaging
{
    struct Rgb
    {
        std::uint8_t r = 0;
        std::uint8_t g = 0;
        std::uint8_t b = 0;
        friend bool operator==(const Rgb&, const Rgb&) = default;
    };

    /// Hue in degrees [0,360), saturation and value in [0,1]. Gray has h = 0.
    struct Hsv
    {
        double h = 0;
        double s = 0;
        double v = 0;
    };

    struct Hsl
    {
        double h = 0;
        double s = 0;
        double l = 0;
    };

    Hsv rgb_to_hsv(Rgb px);
    Rgb hsv_to_rgb(const Hsv& hsv);
    Hsl rgb_to_hsl(Rgb px);
    Rgb hsl_to_rgb(const Hsl& hsl);

    /// Binary region over an image grid; nonzero marks a pixel as selected.
    struct Mask
    {
        std::uint32_t             width  = 0;
        std::uint32_t             height = 0;
        std::vector<std::uint8_t> data;

        Mask() = default;
        Mask(std::uint32_t w, std::uint32_t h, std::uint8_t fill = 0)
            : width(w)
            , height(h)
            , data(static_cast<std::size_t>(w) * h, fill)
        {
        }

        bool at(std::uint32_t x, std::uint32_t y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
        void set(std::uint32_t x, std::uint32_t y, bool v = true)
        {
            data[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
        }
        /// Marks the half-open rectangle [x0,x1)x[y0,y1), clipped to the grid.
        void fill_rect(int x0, int y0, int x1, int y1);
    };

    /// Pixels to paste into a destination image with their top-left corner at
    /// (origin_x, origin_y). alpha has one entry per patch pixel; entries > 0
    /// form the blended region.
    struct Patch
    {
        RasterImage        pixels;
        int                origin_x = 0;
        int                origin_y = 0;
        std::vector<float> alpha;

        static Patch opaque(RasterImage pixels, int origin_x, int origin_y);
    };

    /// Integer pixel rectangle [x0,x1)x[y0,y1).
    struct PixelRect
    {
        int x0 = 0;
        int y0 = 0;
        int x1 = 0;
        int y1 = 0;
        int width() const { return x1 - x0; }
        int height() const { return y1 - y0; }
        bool empty() const { return x1 <= x0 || y1 <= y0; }
    };

    /// Pixels covered by a box: floor of the top-left, ceil of the
    /// bottom-right, clipped to the image.
    PixelRect covering_rect(const LightBox& b, std::uint32_t width, std::uint32_t height);

    RasterImage crop(const RasterImage& img, const PixelRect& rect);
    /// Opaque copy of src into dst at (x, y); parts falling outside dst are dropped.
    void paste(RasterImage& dst, const RasterImage& src, int x, int y);
    RasterImage flip_vertical(const RasterImage& img);
    RasterImage flip_horizontal(const RasterImage& img);
    RasterImage rotate90_clockwise(const RasterImage& img);
    RasterImage rotate90_counterclockwise(const RasterImage& img);

    enum class Exposure
    {
        Brighten,
        Darken,
    };

    /// Lightness gain applied by adjust_lightness_hsl for a severity in 1..5.
    double exposure_gain(int severity);

    /// Per-pixel HSL lightness shift: L' = clamp(L +/- exposure_gain(severity), 0, 1).
    RasterImage adjust_lightness_hsl(const RasterImage& img, int severity, Exposure direction);

    /// Kernel taps (dx, dy) of a k x k line kernel through the center at
    /// angle_deg (counterclockwise from +x, image y pointing down).
    std::vector<std::pair<int, int>> motion_blur_taps(int k, double angle_deg);

    /// Convolution with a normalized line kernel; borders replicate edge pixels.
    RasterImage convolve_motion_blur(const RasterImage& img, int k, double angle_deg);

    struct PoissonOptions
    {
        double tolerance      = 1e-3;
        int    max_iterations = 500;
    };

    /// Gradient-domain paste. The unknowns are the patch pixels with alpha > 0
    /// that are not on the patch border; the destination supplies Dirichlet
    /// values everywhere else and the patch gradients guide the solution.
    /// The one-pixel border of the patch is therefore never written.
    RasterImage poisson_blend(const RasterImage& dst, const Patch& patch, const PoissonOptions& opt = {});

    struct InpaintOptions
    {
        /// Smoothing sweeps applied after the inward march.
        int    smoothing_iterations = 30;
        double tolerance            = 0.05;
    };

    /// Fills the masked pixels from their surroundings: an inward march
    /// seeds each pixel with the mean of its already-known 8-neighbours,
    /// then Gauss-Seidel sweeps relax the region toward a harmonic fill.
    RasterImage inpaint(const RasterImage& img, const Mask& region, const InpaintOptions& opt = {});

    RasterImage render_rain(const RasterImage& img, Interval drop_size, Interval speed, std::uint64_t seed);
    RasterImage render_snow(const RasterImage& img, int severity, std::uint64_t seed);
    RasterImage render_fog(const RasterImage& img, int severity, std::uint64_t seed);
    RasterImage render_flare(const RasterImage& img, Point center, std::uint64_t seed);

    /// Brightness lift applied to the flare half of the frame.
    inline constexpr double flare_brightness_lift = 0.10;

    double mean_luminance(const RasterImage& img);
}
