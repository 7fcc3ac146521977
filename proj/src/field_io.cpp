#include "atc/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include "atc/errors.hpp"

namespace atc
{

static_assert(std::endian::native == std::endian::little,
              "field container is written in host byte order, which must be little-endian");

namespace
{

constexpr char magic[8] = {'A', 'T', 'C', 'F', 'I', 'E', 'L', 'D'};
constexpr std::uint32_t version = 1;

template <class T>
void put(std::string &out, T v)
{
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.append(b, sizeof(T));
}

template <class T>
T get(std::istream &in)
{
  T v;
  char b[sizeof(T)];
  if (!in.read(b, sizeof(T)))
    throw IoError("field file truncated");
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

void write_file_atomic(const std::string &path, const std::string &contents)
{
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), std::streamsize(contents.size()));
    out.flush();
    if (!out)
    {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec)
  {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path + "'");
  }
}

void write_field(const std::string &path, const Field &f, Precision precision)
{
  std::string out;
  out.append(magic, sizeof(magic));
  put<std::uint32_t>(out, version);
  const Grid &g = f.grid();
  for (int a = 0; a < 3; a++)
    put<std::int32_t>(out, g.dim(a));
  put<double>(out, g.spacing());
  for (int a = 0; a < 3; a++)
    put<double>(out, g.origin()[a]);
  put<std::uint32_t>(out, std::uint32_t(f.layout()));
  put<std::uint32_t>(out, std::uint32_t(f.shape().size()));
  for (int s : f.shape())
    put<std::int32_t>(out, s);
  const bool single = precision == Precision::Complex64;
  put<std::uint32_t>(out, single ? 8u : 16u);
  out.reserve(out.size() + f.size() * (single ? 8 : 16));
  for (const cplx &v : f.data())
  {
    if (single)
    {
      put<float>(out, float(v.real()));
      put<float>(out, float(v.imag()));
    }
    else
    {
      put<double>(out, v.real());
      put<double>(out, v.imag());
    }
  }
  write_file_atomic(path, out);
}

Field read_field(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path + "'");
  char m[8];
  if (!in.read(m, 8) || std::memcmp(m, magic, 8) != 0)
    throw IoError("'" + path + "' is not a field container");
  if (get<std::uint32_t>(in) != version)
    throw IoError("unsupported field container version");
  Index3 dims;
  for (int a = 0; a < 3; a++)
    dims[a] = get<std::int32_t>(in);
  double h = get<double>(in);
  Vec3 origin;
  for (int a = 0; a < 3; a++)
    origin[a] = get<double>(in);
  auto layout_tag = get<std::uint32_t>(in);
  if (layout_tag > std::uint32_t(Layout::Tensor))
    throw IoError("unknown layout tag in '" + path + "'");
  std::vector<int> shape(get<std::uint32_t>(in));
  for (int &s : shape)
    s = get<std::int32_t>(in);
  auto width = get<std::uint32_t>(in);
  if (width != 8 && width != 16)
    throw IoError("unknown sample width in '" + path + "'");
  Field f(Grid(dims, h, origin), Layout(layout_tag), shape);
  for (cplx &v : f.data())
  {
    if (width == 8)
    {
      float re = get<float>(in), im = get<float>(in);
      v = cplx(re, im);
    }
    else
    {
      double re = get<double>(in), im = get<double>(in);
      v = cplx(re, im);
    }
  }
  return f;
}

void write_slice_csv(const std::string &path, const Field &f, int axis, int index)
{
  const Grid &g = f.grid();
  if (axis < 0 || axis > 2 || index < 0 || index >= g.dim(axis))
    throw InvalidArgument("write_slice_csv: slice outside grid");
  const int u = axis == 0 ? 1 : 0;
  const int v = axis == 2 ? 1 : 2;
  std::ostringstream os;
  os.precision(17);
  os << "i,j,x,y,z";
  for (int c = 0; c < f.components(); c++)
    os << ",re" << c << ",im" << c;
  os << "\n";
  for (int b = 0; b < g.dim(v); b++)
    for (int a = 0; a < g.dim(u); a++)
    {
      Index3 n{0, 0, 0};
      n[axis] = index;
      n[u] = a;
      n[v] = b;
      Vec3 x = g.position(n);
      os << a << "," << b << "," << x[0] << "," << x[1] << "," << x[2];
      std::size_t node = g.index(n);
      for (int c = 0; c < f.components(); c++)
        os << "," << f(node, c).real() << "," << f(node, c).imag();
      os << "\n";
    }
  write_file_atomic(path, os.str());
}

}  // namespace atc
