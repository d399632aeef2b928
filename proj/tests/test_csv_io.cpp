#include "hdcov/csv_io.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace hdcov;

namespace {

Error parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_csv(in, "t.csv");
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "parse succeeded";
  return Error(ErrorCode::Io, "");
}

}  // namespace

TEST(CsvIo, HeaderAutoDetection) {
  std::istringstream with("a,b\n1,2\n3,4\n5,6\n");
  std::istringstream without("1,2\n3,4\n5,6\n");
  const SampleBlock a = parse_csv(with);
  const SampleBlock b = parse_csv(without);
  EXPECT_EQ(a.data(), b.data());
  EXPECT_EQ(b.n(), 3);
}

TEST(CsvIo, NumberForms) {
  std::istringstream in("1e-3, +2.5 ,-7\n\n3E2,0.0,.5\r\n1,2,3\n");
  const SampleBlock b = parse_csv(in);
  EXPECT_DOUBLE_EQ(b.data()(0, 0), 1e-3);
  EXPECT_DOUBLE_EQ(b.data()(0, 1), 2.5);
  EXPECT_DOUBLE_EQ(b.data()(1, 0), 300.0);
  EXPECT_DOUBLE_EQ(b.data()(1, 2), 0.5);
}

TEST(CsvIo, NaNCellNamesLineAndColumn) {
  const Error e = parse_error("x,y\n1,2\n3,NaN\n5,6\n");
  EXPECT_EQ(e.code(), ErrorCode::NonFiniteEntry);
  EXPECT_NE(std::string(e.what()).find("line 3, column 2"), std::string::npos) << e.what();
}

TEST(CsvIo, MalformedCells) {
  const Error bad = parse_error("1,2\n3,abc\n5,6\n");
  EXPECT_EQ(bad.code(), ErrorCode::Parse);
  EXPECT_NE(std::string(bad.what()).find("line 2, column 2"), std::string::npos);
  EXPECT_EQ(parse_error("1,2\n3\n5,6\n").code(), ErrorCode::Parse);
  EXPECT_EQ(parse_error("1,,2\n3,4,5\n5,6,7\n").code(), ErrorCode::Parse);
  EXPECT_EQ(parse_error("a,b\n").code(), ErrorCode::Parse);
  EXPECT_EQ(parse_error("1;2\n3;4\n5;6\n").code(), ErrorCode::Parse);
}

TEST(CsvIo, MissingFile) {
  try {
    read_csv("/nonexistent/file.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

TEST(CsvIo, RoundTripIsBitExact) {
  Matrix m = testutil::random_matrix(20, 7, 5);
  m(0, 0) = 1e-300;
  m(1, 1) = -123456789.123456789;
  m(2, 2) = 0.1;
  const SampleBlock b(m);
  std::stringstream io;
  write_csv(b, io);
  EXPECT_EQ(parse_csv(io).data(), b.data());
}

TEST(CsvIo, ColumnOutput) {
  std::ostringstream out;
  write_column_csv({0.5, -2.0}, "draw", out);
  EXPECT_EQ(out.str(), "draw\n0.5\n-2\n");
}
