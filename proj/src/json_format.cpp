#include "atc/json_format.hpp"

#include <cmath>
#include <cstdio>

namespace atc
{

namespace
{

void write_string(std::string &out, const std::string &s)
{
  // reuse the library's escaping for strings
  out += nlohmann::json(s).dump();
}

void write(std::string &out, const nlohmann::json &j, int indent, int depth)
{
  auto newline = [&](int d) {
    if (indent < 0)
      return;
    out += '\n';
    out.append(std::size_t(indent * d), ' ');
  };
  switch (j.type())
  {
    case nlohmann::json::value_t::object:
    {
      if (j.empty())
      {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it)
      {
        if (!first)
          out += ',';
        first = false;
        newline(depth + 1);
        write_string(out, it.key());
        out += indent < 0 ? ":" : ": ";
        write(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case nlohmann::json::value_t::array:
    {
      if (j.empty())
      {
        out += "[]";
        return;
      }
      // numeric arrays stay on one line
      bool flat = true;
      for (const auto &e : j)
        flat = flat && e.is_primitive();
      out += '[';
      bool first = true;
      for (const auto &e : j)
      {
        if (!first)
          out += flat ? ", " : ",";
        first = false;
        if (!flat)
          newline(depth + 1);
        write(out, e, indent, depth + 1);
      }
      if (!flat)
        newline(depth);
      out += ']';
      return;
    }
    case nlohmann::json::value_t::number_float:
    {
      double v = j.get<double>();
      if (!std::isfinite(v))
      {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::json &j, int indent)
{
  std::string out;
  write(out, j, indent, 0);
  out += '\n';
  return out;
}

nlohmann::json to_json(cplx z)
{
  return nlohmann::json::array({z.real(), z.imag()});
}

nlohmann::json to_json(const Vec3c &v)
{
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < 3; i++)
    a.push_back(to_json(v[i]));
  return a;
}

nlohmann::json to_json(const Eigen::MatrixXcd &m)
{
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int r = 0; r < m.rows(); r++)
  {
    nlohmann::json rr = nlohmann::json::array(), ir = nlohmann::json::array();
    for (int c = 0; c < m.cols(); c++)
    {
      rr.push_back(m(r, c).real());
      ir.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ir);
  }
  return {{"re", re}, {"im", im}};
}

nlohmann::json to_json(const Region &r)
{
  if (const Box *b = std::get_if<Box>(&r))
    return {{"kind", "box"}, {"lo", b->lo}, {"hi", b->hi}};
  const Ball &ball = std::get<Ball>(r);
  return {{"kind", "ball"},
          {"center", {ball.center[0], ball.center[1], ball.center[2]}},
          {"radius", ball.radius}};
}

}  // namespace atc
