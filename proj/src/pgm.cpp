#include "ctmark/pgm.hpp"

#include <cctype>
#include <fstream>

namespace ctmark {

namespace {

// Reads the next whitespace-delimited token, skipping '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            while ((c = in.get()) != EOF && !std::isspace(c) && c != '#')
                tok.push_back(static_cast<char>(c));
            if (c == '#')
                while ((c = in.get()) != EOF && c != '\n') {}
            break;
        }
    }
    return tok;
}

int parse_positive_int(const std::string& tok, const char* what) {
    if (tok.empty()) throw std::runtime_error(std::string("PGM: truncated header (") + what + ")");
    size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(tok, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("PGM: malformed ") + what);
    }
    if (pos != tok.size() || v < 1 || v > 1 << 20)
        throw std::runtime_error(std::string("PGM: malformed ") + what);
    return static_cast<int>(v);
}

}  // namespace

ImageU8 load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("PGM: cannot open " + path);

    std::string magic = next_token(in);
    if (magic == "P2")
        throw std::runtime_error("PGM: ASCII PGM (P2) unsupported, use binary P5");
    if (magic != "P5")
        throw std::runtime_error("PGM: bad magic, expected P5");

    int width = parse_positive_int(next_token(in), "width");
    int height = parse_positive_int(next_token(in), "height");
    int maxval = parse_positive_int(next_token(in), "maxval");
    if (maxval != 255)
        throw std::runtime_error("PGM: maxval must be 255");

    // The header is terminated by exactly one whitespace byte, already
    // consumed by the tokenizer.
    ImageU8 img(width, height);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
        throw std::runtime_error("PGM: truncated pixel data");
    return img;
}

void save_pgm(const std::string& path, const ImageU8& img) {
    if (img.width < 1 || img.height < 1 ||
        img.pixels.size() != static_cast<size_t>(img.width) * img.height)
        throw std::invalid_argument("PGM: invalid image");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("PGM: cannot write " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw std::runtime_error("PGM: write failed for " + path);
}

}  // namespace ctmark
