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

#include <filesystem>
#include <string>

#include <unistd.h>

#include <gtest/gtest.h>

#include "lightaug/core_model.hpp"

#define EXPECT_ERRC(statement, expected_code)                                                          \
    do                                                                                                 \
    {                                                                                                  \
        try                                                                                            \
        {                                                                                              \
            statement;                                                                                 \
            ADD_FAILURE() << "expected lightaug::Error(" << ::lightaug::errc_name(expected_code)       \
                          << ") from " #statement;                                                     \
        }                                                                                              \
        catch (const ::lightaug::Error& e)                                                             \
        {                                                                                              \
            EXPECT_EQ(e.code(), expected_code) << e.what();                                            \
        }                                                                                              \
    } while (0)

namespace lightaug::testing
{
    inline std::filesystem::path data_dir() { return LIGHTAUG_TEST_DATA_DIR; }

    /// Fresh empty directory under the build tree, removed on destruction.
    class ScratchDir
    {
    public:
        explicit ScratchDir(const std::string& name)
            : m_path(std::filesystem::temp_directory_path() / ("lightaug_" + name + "_" + std::to_string(::getpid())))
        {
            std::filesystem::remove_all(m_path);
            std::filesystem::create_directories(m_path);
        }
        ~ScratchDir() { std::filesystem::remove_all(m_path); }
        ScratchDir(const ScratchDir&)            = delete;
        ScratchDir& operator=(const ScratchDir&) = delete;

        const std::filesystem::path& path() const { return m_path; }
        std::filesystem::path operator/(const std::string& s) const { return m_path / s; }

    private:
        std::filesystem::path m_path;
    };
}
