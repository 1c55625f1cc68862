#include <stdio.h>
#include <string.h>
#include "heffter.h"

int main(int argc, char **argv) {
    if (argc < 2) return 2;
    FILE *f = fopen(argv[1], "r");
    if (!f) return 2;
    static char buf[1 << 16];
    size_t n = fread(buf, 1, sizeof buf - 1, f);
    fclose(f);
    buf[n] = 0;

    HeffterArray *a = NULL;
    if (heffter_array_parse(buf, &a) != HEFFTER_STATUS_OK) return 3;
    bool pass = false;
    if (heffter_array_validate(a, &pass) != HEFFTER_STATUS_OK || !pass) return 4;

    int8_t r[11], c[11];
    for (int i = 0; i < 11; i++) { r[i] = 1; c[i] = 1; }
    c[0] = -1;
    HeffterEmbedding *e = NULL;
    if (heffter_embedding_build(a, r, 11, c, 11, &e) != HEFFTER_STATUS_OK) return 5;
    int64_t genus = 0;
    if (heffter_embedding_genus(a, e, &genus) != HEFFTER_STATUS_OK) return 6;

    c[0] = 1;
    HeffterEmbedding *bad = NULL;
    if (heffter_embedding_build(a, r, 11, c, 11, &bad) != HEFFTER_STATUS_NOT_COMPATIBLE) return 7;
    if (strstr(heffter_last_error(), "not compatible") == NULL) return 8;

    printf("genus %lld\n", (long long)genus);
    heffter_embedding_free(e);
    heffter_array_free(a);
    return 0;
}
