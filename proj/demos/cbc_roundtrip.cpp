// Minimal tour of the cipher layer: expand a key, CBC a message, undo it.

#include <cstdio>

#include "mcucrypt/cbc.hpp"
#include "mcucrypt/text.hpp"

int main() {
    using namespace mcucrypt;

    const auto key = from_hex("2b7e151628aed2a6abf7158809cf4f3c");
    const auto iv_bytes = from_hex("000102030405060708090a0b0c0d0e0f");
    aes::block iv{};
    std::copy(iv_bytes.begin(), iv_bytes.end(), iv.begin());

    const cbc::context ctx{aes::key_schedule(aes::cipher_key(key)), iv};

    const std::string text = "sensor reading: hall 4, 21.5 C";
    const std::vector<std::uint8_t> message(text.begin(), text.end());

    const auto ciphertext = cbc::encrypt(ctx, message, cbc::padding::pkcs7);
    const auto recovered = cbc::decrypt(ctx, ciphertext, cbc::padding::pkcs7);

    std::printf("plaintext : %s\n", text.c_str());
    std::printf("ciphertext: %s\n", to_hex(ciphertext).c_str());
    std::printf("recovered : %s\n",
                std::string(recovered.begin(), recovered.end()).c_str());
    return recovered == message ? 0 : 1;
}
