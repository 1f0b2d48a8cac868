// Offline subprocess backend speaking the stdin/stdout JSON contract.
// Extractor requests ({"image_b64": ...}) get a fixed chart representation;
// reasoner requests ({"prompt": ...}) echo a marker plus the prompt size.
// Used by the test suite to exercise the subprocess transport end to end.

#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

int main() {
  std::ostringstream buffer;
  buffer << std::cin.rdbuf();
  nlohmann::json request;
  try {
    request = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::exception&) {
    return 1;
  }

  nlohmann::json response;
  if (request.contains("prompt")) {
    response["text"] = "stub-reasoner:" +
                       std::to_string(request["prompt"].get<std::string>().size()) +
                       ":" + std::to_string(request.value("max_new_tokens", 0));
  } else {
    response["title"] = "Stub Title";
    response["type"] = "bar";
    response["csv"] = "Category,Value\nA,1\nB,2\n";
  }
  std::cout << response.dump() << std::endl;
  return 0;
}
