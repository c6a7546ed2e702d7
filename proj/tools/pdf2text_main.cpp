#include <fstream>
#include <iostream>
#include <sstream>

#include "litpipe/error.hpp"
#include "litpipe/pdf.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: litpipe-pdf2text <file.pdf>\n";
        return 2;
    }
    std::ifstream in(argv[1], std::ios::binary);
    if (!in) {
        std::cerr << "cannot open " << argv[1] << "\n";
        return 1;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        std::cout << litpipe::pdf::extract_text(ss.str());
    } catch (const litpipe::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
