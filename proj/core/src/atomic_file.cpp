#include "rarequant/atomic_file.hpp"

#include <fstream>
#include <system_error>

#include "rarequant/error.hpp"

namespace rarequant {

void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer) {
    auto tmp = path;
    tmp += ".tmp";
    try {
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
            writer(out);
            out.flush();
            if (!out) throw Error("write to '" + tmp.string() + "' failed");
        }
        std::filesystem::rename(tmp, path);
    } catch (...) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw;
    }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    write_file_atomic(path, [&](std::ostream& out) { out.write(contents.data(), static_cast<std::streamsize>(contents.size())); });
}

}  // namespace rarequant
