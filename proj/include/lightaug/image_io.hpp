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
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "lightaug/core_model.hpp"

namespace lightaug
{
    /// Decodes a PNG or JPEG file (detected from its signature) to RGB8.
    RasterImage read_image(const std::filesystem::path& path);

    RasterImage decode_png(std::span<const std::uint8_t> bytes);
    std::vector<std::uint8_t> encode_png(const RasterImage& img);
    void write_png(const RasterImage& img, const std::filesystem::path& path);

    std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

    /// Writes to a sibling temporary file and renames it into place, creating
    /// parent directories as needed.
    void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
    void write_file_atomic(const std::filesystem::path& path, std::string_view text);
}
