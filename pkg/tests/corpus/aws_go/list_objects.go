package main

import (
	"os"

	"github.com/aws/aws-sdk-go/aws"
	"github.com/aws/aws-sdk-go/aws/session"
	"github.com/aws/aws-sdk-go/service/s3"
)

func Handler() (int, error) {
	svc := s3.New(session.Must(session.NewSession()))
	out, err := svc.ListObjectsV2(&s3.ListObjectsV2Input{
		Bucket: aws.String(os.Getenv("SCAN_BUCKET")),
	})
	if err != nil {
		return 0, err
	}
	return len(out.Contents), nil
}
