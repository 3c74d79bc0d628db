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

#include "lightaug/image_io.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include <jpeglib.h>
#include <png.h>

using namespace std;
namespace fs = std::filesystem;

namespace lightaug
{
    namespace
    {
        struct JpegErrorManager
        {
            jpeg_error_mgr pub;
            jmp_buf        jump;
            char           message[JMSG_LENGTH_MAX];
        };

        void jpeg_error_exit(j_common_ptr cinfo)
        {
            auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
            (*cinfo->err->format_message)(cinfo, err->message);
            longjmp(err->jump, 1);
        }

        RasterImage decode_jpeg(span<const uint8_t> bytes, const fs::path& path)
        {
            jpeg_decompress_struct cinfo{};
            JpegErrorManager       err{};
            cinfo.err           = jpeg_std_error(&err.pub);
            err.pub.error_exit  = jpeg_error_exit;
            vector<uint8_t> data;
            uint32_t        width = 0, height = 0;
            if (setjmp(err.jump))
            {
                jpeg_destroy_decompress(&cinfo);
                throw Error(Errc::io_error, path.string() + ": JPEG decode failed: " + err.message);
            }
            jpeg_create_decompress(&cinfo);
            jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
            jpeg_read_header(&cinfo, TRUE);
            cinfo.out_color_space = JCS_RGB;
            jpeg_start_decompress(&cinfo);
            width  = cinfo.output_width;
            height = cinfo.output_height;
            data.resize(static_cast<size_t>(width) * height * 3);
            while (cinfo.output_scanline < cinfo.output_height)
            {
                JSAMPROW row = data.data() + static_cast<size_t>(cinfo.output_scanline) * width * 3;
                jpeg_read_scanlines(&cinfo, &row, 1);
            }
            jpeg_finish_decompress(&cinfo);
            jpeg_destroy_decompress(&cinfo);
            return RasterImage(width, height, std::move(data));
        }
    }

    vector<uint8_t> read_file(const fs::path& path)
    {
        ifstream in(path, ios::binary);
        if (!in)
        {
            throw Error(Errc::io_error, "cannot open '" + path.string() + "'");
        }
        return vector<uint8_t>(istreambuf_iterator<char>(in), istreambuf_iterator<char>());
    }

    RasterImage decode_png(span<const uint8_t> bytes)
    {
        png_image image;
        memset(&image, 0, sizeof image);
        image.version = PNG_IMAGE_VERSION;
        if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        {
            throw Error(Errc::io_error, string("PNG decode failed: ") + image.message);
        }
        image.format = PNG_FORMAT_RGB;
        vector<uint8_t> data(PNG_IMAGE_SIZE(image));
        if (!png_image_finish_read(&image, nullptr, data.data(), 0, nullptr))
        {
            png_image_free(&image);
            throw Error(Errc::io_error, string("PNG decode failed: ") + image.message);
        }
        return RasterImage(image.width, image.height, std::move(data));
    }

    RasterImage read_image(const fs::path& path)
    {
        const auto bytes = read_file(path);
        static constexpr uint8_t png_sig[] = {0x89, 'P', 'N', 'G'};
        if (bytes.size() >= 4 && equal(begin(png_sig), end(png_sig), bytes.begin()))
        {
            try
            {
                return decode_png(bytes);
            }
            catch (const Error& e)
            {
                throw Error(Errc::io_error, path.string() + ": " + e.what());
            }
        }
        if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xD8)
        {
            return decode_jpeg(bytes, path);
        }
        throw Error(Errc::io_error, path.string() + ": unsupported image format (expected PNG or JPEG)");
    }

    vector<uint8_t> encode_png(const RasterImage& img)
    {
        png_image image;
        memset(&image, 0, sizeof image);
        image.version = PNG_IMAGE_VERSION;
        image.width   = img.width();
        image.height  = img.height();
        image.format  = PNG_FORMAT_RGB;
        png_alloc_size_t size = 0;
        if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.data().data(), 0, nullptr))
        {
            throw Error(Errc::io_error, string("PNG encode failed: ") + image.message);
        }
        vector<uint8_t> out(size);
        if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.data().data(), 0, nullptr))
        {
            throw Error(Errc::io_error, string("PNG encode failed: ") + image.message);
        }
        out.resize(size);
        return out;
    }

    void write_png(const RasterImage& img, const fs::path& path) { write_file_atomic(path, encode_png(img)); }

    void write_file_atomic(const fs::path& path, span<const uint8_t> bytes)
    {
        if (path.has_parent_path())
        {
            fs::create_directories(path.parent_path());
        }
        fs::path tmp = path;
        tmp += ".tmp";
        {
            ofstream out(tmp, ios::binary | ios::trunc);
            if (!out)
            {
                throw Error(Errc::io_error, "cannot write '" + tmp.string() + "'");
            }
            out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<streamsize>(bytes.size()));
            if (!out)
            {
                throw Error(Errc::io_error, "write failed for '" + tmp.string() + "'");
            }
        }
        fs::rename(tmp, path);
    }

    void write_file_atomic(const fs::path& path, string_view text)
    {
        write_file_atomic(path, span<const uint8_t>(reinterpret_cast<const uint8_t*>(text.data()), text.size()));
    }
}
