#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rcsvd/io/matrix_market.hpp"
#include "rcsvd/io/pgm.hpp"
#include "test_helpers.hpp"

using namespace rcsvd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path(RCSVD_TEST_TMPDIR) / "io";
    fs::create_directories(dir);
    return dir / name;
}

std::string error_of(const std::string& text) {
    std::istringstream in(text);
    try {
        io::read_matrix_market(in);
    } catch (const FormatError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(MatrixMarket, ReadsColumnMajorArray) {
    std::istringstream in("%%MatrixMarket matrix array real general\n% comment\n2 3\n1\n4\n2\n5\n3\n6\n");
    EXPECT_EQ(io::read_matrix_market(in), (DenseMatrix{{1, 2, 3}, {4, 5, 6}}));
}

TEST(MatrixMarket, AcceptsIntegerFieldAndCaseInsensitiveBanner) {
    std::istringstream in("%%MatrixMarket MATRIX Array Integer General\n1 2\n7 8\n");
    EXPECT_EQ(io::read_matrix_market(in), (DenseMatrix{{7, 8}}));
}

TEST(MatrixMarket, RoundTripIsBitExact) {
    const DenseMatrix a = rcsvd::testing::random_matrix(13, 7, 42);
    std::stringstream buf;
    io::write_matrix_market(a, buf);
    EXPECT_EQ(io::read_matrix_market(buf), a);

    const fs::path path = scratch("roundtrip.mtx");
    io::write_matrix_market(a, path);
    EXPECT_EQ(io::read_matrix_market(path), a);
    EXPECT_FALSE(fs::exists(path.string() + ".tmp"));
}

TEST(MatrixMarket, CountMismatchReportsSizeLine) {
    const std::string msg = error_of("%%MatrixMarket matrix array real general\n% c\n2 2\n1\n2\n3\n");
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("found 3"), std::string::npos) << msg;
    EXPECT_NE(error_of("%%MatrixMarket matrix array real general\n1 1\n1 2\n").find("found more"),
              std::string::npos);
}

TEST(MatrixMarket, RejectsUnsupportedVariants) {
    EXPECT_NE(error_of("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 1\n").find("coordinate"),
              std::string::npos);
    EXPECT_NE(error_of("%%MatrixMarket matrix array complex general\n1 1\n1 0\n").find("complex"),
              std::string::npos);
    EXPECT_NE(error_of("%%MatrixMarket matrix array real symmetric\n1 1\n1\n").find("symmetric"),
              std::string::npos);
    EXPECT_FALSE(error_of("hello\n").empty());
    EXPECT_FALSE(error_of("").empty());
}

TEST(MatrixMarket, RejectsBadValuesWithLineNumber) {
    const std::string msg = error_of("%%MatrixMarket matrix array real general\n2 1\n1\nabc\n");
    EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
    EXPECT_FALSE(error_of("%%MatrixMarket matrix array real general\n1 1\nnan\n").empty());
    EXPECT_FALSE(error_of("%%MatrixMarket matrix array real general\n1 1\ninf\n").empty());
    EXPECT_FALSE(error_of("%%MatrixMarket matrix array real general\n0 1\n").empty());
}

TEST(MatrixMarket, MissingFileIsIoError) {
    EXPECT_THROW(io::read_matrix_market(scratch("does-not-exist.mtx")), IoError);
}

TEST(Pgm, P5RoundTripIsLossless) {
    GrayImage img{5, 3, {}};
    for (std::size_t i = 0; i < 15; ++i) img.pixels.push_back(static_cast<std::uint8_t>(i * 17));
    const fs::path path = scratch("img.pgm");
    io::write_pgm(img, path);
    EXPECT_EQ(io::read_pgm(path), img);
}

TEST(Pgm, ReadsAsciiWithComments) {
    std::istringstream in("P2\n# a comment\n3 2 # trailing\n255\n0 10 20\n30 40 255\n");
    const GrayImage img = io::read_pgm(in);
    EXPECT_EQ(img.width, 3u);
    EXPECT_EQ(img.height, 2u);
    EXPECT_EQ(img.at(1, 2), 255);
    EXPECT_EQ(img.at(0, 1), 10);
}

TEST(Pgm, TruncatedPayloadNamesCounts) {
    std::istringstream in(std::string("P5\n4 2\n255\n") + std::string(5, 'x'));
    try {
        io::read_pgm(in);
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("expected 8 bytes, found 5"), std::string::npos)
            << e.what();
    }
}

TEST(Pgm, RejectsBadHeaders) {
    std::istringstream wide("P5\n1 1\n65535\n\x01\x02");
    EXPECT_THROW(io::read_pgm(wide), FormatError);
    std::istringstream magic("P6\n1 1\n255\nabc");
    EXPECT_THROW(io::read_pgm(magic), FormatError);
    std::istringstream over("P2\n1 1\n100\n200\n");
    EXPECT_THROW(io::read_pgm(over), FormatError);
}
