#include <stdio.h>
#include <string.h>
#include "hytw.h"

#define CHECK(x) do { if (!(x)) { fprintf(stderr, "failed: %s\n", #x); return 1; } } while (0)

int main(void) {
    HytwGame *g = NULL;
    uint8_t winner = 0;
    uint64_t rank = 0;
    CHECK(hytw_game_parse(".\n0\n0 0\n", &g) == HYTW_STATUS_OK);
    CHECK(hytw_game_solve(g, 0, &winner, &rank) == HYTW_STATUS_OK);
    CHECK(winner == 2 && rank == 2);
    hytw_game_free(g);

    char *sum = NULL;
    CHECK(hytw_ordinal_add("3", "w", &sum) == HYTW_STATUS_OK);
    CHECK(strcmp(sum, "w") == 0);
    hytw_string_free(sum);

    HytwCondition *c = NULL;
    CHECK(hytw_condition_parse(". oops\n", &c) == HYTW_STATUS_SYNTAX);
    CHECK(hytw_last_error() != NULL);
    printf("ok %s\n", hytw_version());
    return 0;
}
