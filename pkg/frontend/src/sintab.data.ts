// Generated by scripts/gen-sintab.mjs; do not edit by hand.
// sin(i * 0.1 deg) scaled by 1e6, i = 0..900.
export const SINTAB: readonly number[] = [
  0, 1745, 3491, 5236, 6981, 8727, 10472, 12217, 13962, 15707,
  17452, 19197, 20942, 22687, 24432, 26177, 27922, 29666, 31411, 33155,
  34899, 36644, 38388, 40132, 41876, 43619, 45363, 47106, 48850, 50593,
  52336, 54079, 55822, 57564, 59306, 61049, 62791, 64532, 66274, 68015,
  69756, 71497, 73238, 74979, 76719, 78459, 80199, 81939, 83678, 85417,
  87156, 88894, 90633, 92371, 94108, 95846, 97583, 99320, 101056, 102793,
  104528, 106264, 107999, 109734, 111469, 113203, 114937, 116671, 118404, 120137,
  121869, 123601, 125333, 127065, 128796, 130526, 132256, 133986, 135716, 137445,
  139173, 140901, 142629, 144356, 146083, 147809, 149535, 151261, 152986, 154710,
  156434, 158158, 159881, 161604, 163326, 165048, 166769, 168489, 170209, 171929,
  173648, 175367, 177085, 178802, 180519, 182236, 183951, 185667, 187381, 189095,
  190809, 192522, 194234, 195946, 197657, 199368, 201078, 202787, 204496, 206204,
  207912, 209619, 211325, 213030, 214735, 216440, 218143, 219846, 221548, 223250,
  224951, 226651, 228351, 230050, 231748, 233445, 235142, 236838, 238533, 240228,
  241922, 243615, 245307, 246999, 248690, 250380, 252069, 253758, 255446, 257133,
  258819, 260505, 262189, 263873, 265556, 267238, 268920, 270600, 272280, 273959,
  275637, 277315, 278991, 280667, 282341, 284015, 285688, 287361, 289032, 290702,
  292372, 294040, 295708, 297375, 299041, 300706, 302370, 304033, 305695, 307357,
  309017, 310676, 312335, 313992, 315649, 317305, 318959, 320613, 322266, 323917,
  325568, 327218, 328867, 330514, 332161, 333807, 335452, 337095, 338738, 340380,
  342020, 343660, 345298, 346936, 348572, 350207, 351842, 353475, 355107, 356738,
  358368, 359997, 361625, 363251, 364877, 366501, 368125, 369747, 371368, 372988,
  374607, 376224, 377841, 379456, 381070, 382683, 384295, 385906, 387516, 389124,
  390731, 392337, 393942, 395546, 397148, 398749, 400349, 401948, 403545, 405142,
  406737, 408330, 409923, 411514, 413104, 414693, 416281, 417867, 419452, 421036,
  422618, 424199, 425779, 427358, 428935, 430511, 432086, 433659, 435231, 436802,
  438371, 439939, 441506, 443071, 444635, 446198, 447759, 449319, 450878, 452435,
  453990, 455545, 457098, 458650, 460200, 461749, 463296, 464842, 466387, 467930,
  469472, 471012, 472551, 474088, 475624, 477159, 478692, 480223, 481754, 483282,
  484810, 486335, 487860, 489382, 490904, 492424, 493942, 495459, 496974, 498488,
  500000, 501511, 503020, 504528, 506034, 507538, 509041, 510543, 512043, 513541,
  515038, 516533, 518027, 519519, 521010, 522499, 523986, 525472, 526956, 528438,
  529919, 531399, 532876, 534352, 535827, 537300, 538771, 540240, 541708, 543174,
  544639, 546102, 547563, 549023, 550481, 551937, 553392, 554844, 556296, 557745,
  559193, 560639, 562083, 563526, 564967, 566406, 567844, 569280, 570714, 572146,
  573576, 575005, 576432, 577858, 579281, 580703, 582123, 583541, 584958, 586372,
  587785, 589196, 590606, 592013, 593419, 594823, 596225, 597625, 599024, 600420,
  601815, 603208, 604599, 605988, 607376, 608761, 610145, 611527, 612907, 614285,
  615661, 617036, 618408, 619779, 621148, 622515, 623880, 625243, 626604, 627963,
  629320, 630676, 632029, 633381, 634731, 636078, 637424, 638768, 640110, 641450,
  642788, 644124, 645458, 646790, 648120, 649448, 650774, 652098, 653421, 654741,
  656059, 657375, 658689, 660002, 661312, 662620, 663926, 665230, 666532, 667833,
  669131, 670427, 671721, 673013, 674302, 675590, 676876, 678160, 679441, 680721,
  681998, 683274, 684547, 685818, 687088, 688355, 689620, 690882, 692143, 693402,
  694658, 695913, 697165, 698415, 699663, 700909, 702153, 703395, 704634, 705872,
  707107, 708340, 709571, 710799, 712026, 713250, 714473, 715693, 716911, 718126,
  719340, 720551, 721760, 722967, 724172, 725374, 726575, 727773, 728969, 730162,
  731354, 732543, 733730, 734915, 736097, 737277, 738455, 739631, 740805, 741976,
  743145, 744312, 745476, 746638, 747798, 748956, 750111, 751264, 752415, 753563,
  754710, 755853, 756995, 758134, 759271, 760406, 761538, 762668, 763796, 764921,
  766044, 767165, 768284, 769400, 770513, 771625, 772734, 773840, 774944, 776046,
  777146, 778243, 779338, 780430, 781520, 782608, 783693, 784776, 785857, 786935,
  788011, 789084, 790155, 791224, 792290, 793353, 794415, 795473, 796530, 797584,
  798636, 799685, 800731, 801776, 802817, 803857, 804894, 805928, 806960, 807990,
  809017, 810042, 811064, 812084, 813101, 814116, 815128, 816138, 817145, 818150,
  819152, 820152, 821149, 822144, 823136, 824126, 825113, 826098, 827081, 828060,
  829038, 830012, 830984, 831954, 832921, 833886, 834848, 835807, 836764, 837719,
  838671, 839620, 840567, 841511, 842452, 843391, 844328, 845262, 846193, 847122,
  848048, 848972, 849893, 850811, 851727, 852640, 853551, 854459, 855364, 856267,
  857167, 858065, 858960, 859852, 860742, 861629, 862514, 863396, 864275, 865151,
  866025, 866897, 867765, 868632, 869495, 870356, 871214, 872069, 872922, 873772,
  874620, 875465, 876307, 877146, 877983, 878817, 879649, 880477, 881303, 882127,
  882948, 883766, 884581, 885394, 886204, 887011, 887815, 888617, 889416, 890213,
  891007, 891798, 892586, 893371, 894154, 894934, 895712, 896486, 897258, 898028,
  898794, 899558, 900319, 901077, 901833, 902585, 903335, 904083, 904827, 905569,
  906308, 907044, 907777, 908508, 909236, 909961, 910684, 911403, 912120, 912834,
  913545, 914254, 914960, 915663, 916363, 917060, 917755, 918446, 919135, 919821,
  920505, 921185, 921863, 922538, 923210, 923880, 924546, 925210, 925871, 926529,
  927184, 927836, 928486, 929133, 929776, 930418, 931056, 931691, 932324, 932954,
  933580, 934204, 934826, 935444, 936060, 936672, 937282, 937889, 938493, 939094,
  939693, 940288, 940881, 941471, 942057, 942641, 943223, 943801, 944376, 944949,
  945519, 946085, 946649, 947210, 947768, 948324, 948876, 949425, 949972, 950516,
  951057, 951594, 952129, 952661, 953191, 953717, 954240, 954761, 955278, 955793,
  956305, 956814, 957319, 957822, 958323, 958820, 959314, 959805, 960294, 960779,
  961262, 961741, 962218, 962692, 963163, 963630, 964095, 964557, 965016, 965473,
  965926, 966376, 966823, 967268, 967709, 968148, 968583, 969016, 969445, 969872,
  970296, 970716, 971134, 971549, 971961, 972370, 972776, 973179, 973579, 973976,
  974370, 974761, 975149, 975535, 975917, 976296, 976672, 977046, 977416, 977783,
  978148, 978509, 978867, 979223, 979575, 979925, 980271, 980615, 980955, 981293,
  981627, 981959, 982287, 982613, 982935, 983255, 983571, 983885, 984196, 984503,
  984808, 985109, 985408, 985703, 985996, 986286, 986572, 986856, 987136, 987414,
  987688, 987960, 988228, 988494, 988756, 989016, 989272, 989526, 989776, 990024,
  990268, 990509, 990748, 990983, 991216, 991445, 991671, 991894, 992115, 992332,
  992546, 992757, 992966, 993171, 993373, 993572, 993768, 993961, 994151, 994338,
  994522, 994703, 994881, 995056, 995227, 995396, 995562, 995725, 995884, 996041,
  996195, 996345, 996493, 996637, 996779, 996917, 997053, 997185, 997314, 997441,
  997564, 997684, 997801, 997916, 998027, 998135, 998240, 998342, 998441, 998537,
  998630, 998719, 998806, 998890, 998971, 999048, 999123, 999194, 999263, 999328,
  999391, 999450, 999507, 999560, 999610, 999657, 999701, 999743, 999781, 999816,
  999848, 999877, 999903, 999925, 999945, 999962, 999976, 999986, 999994, 999998,
  1000000,
];
